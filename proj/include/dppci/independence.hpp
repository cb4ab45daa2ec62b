// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "dppci/dpp.hpp"
#include "dppci/oracle.hpp"

#include <string>

namespace dppci {

/// Is Y_A independent of Y_B given (C subset of Y) and (C' disjoint from Y)?
struct CiQuery {
  IndexSet a;
  IndexSet b;
  IndexSet given_included;
  IndexSet given_excluded;
};

/// Outcome of a zero-block test. `criterion_value` is the max-abs entry of
/// the tested block; `independent` holds iff it is <= `tolerance_used`.
struct CiVerdict {
  bool independent = true;
  double criterion_value = 0.0;
  std::string criterion;
  double tolerance_used = 0.0;
};

namespace criteria {
inline constexpr const char* kTrivial = "empty query set";
inline constexpr const char* kMarginal = "K_AB = 0";
inline constexpr const char* kGivenInclusion = "K^C_AB = 0";
inline constexpr const char* kGivenExclusion = "(I-K)^C_AB = 0";
inline constexpr const char* kGivenEvent = "conditional kernel block = 0";
inline constexpr const char* kPairwiseInverse = "(K^-1)_ij = 0";
inline constexpr const char* kPairwiseEnsemble = "L_ij = 0";
}  // namespace criteria

namespace detail {

/// Zero-block decision with the threshold scaled by the whole matrix.
template <typename Scalar>
CiVerdict zero_block_verdict(const MatrixX<Scalar>& full, const MatrixX<Scalar>& blk,
                             const char* criterion, double tau_zero) {
  CiVerdict v;
  v.criterion = criterion;
  v.criterion_value = static_cast<double>(max_abs(blk));
  v.tolerance_used = tau_zero * static_cast<double>(max_abs(full));
  v.independent = v.criterion_value <= v.tolerance_used;
  return v;
}

inline CiVerdict trivial_verdict() {
  CiVerdict v;
  v.criterion = criteria::kTrivial;
  return v;
}

inline void check_query(const CiQuery& q, int n) {
  for (const IndexSet* s : {&q.a, &q.b, &q.given_included, &q.given_excluded}) {
    s->check_within(n);
  }
  require_pairwise_disjoint({&q.a, &q.b, &q.given_included, &q.given_excluded});
}

inline void check_pair(int i, int j, int n) {
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw Error(ErrorKind::IndexOutOfRange, "pair index out of range");
  }
  if (i == j) throw Error(ErrorKind::OverlappingSets, "pair indices must differ");
}

}  // namespace detail

/// Y_A and Y_B are independent iff K_AB = 0. The same block decides
/// (A in Y) vs (B in Y), (A in Y) vs (B out of Y) and (A out) vs (B out).
template <typename Scalar>
CiVerdict test_marginal_independence(const DppModel<Scalar>& model, const IndexSet& a,
                                     const IndexSet& b) {
  detail::check_query({a, b, {}, {}}, model.n());
  if (a.empty() || b.empty()) return detail::trivial_verdict();
  const auto& k = model.marginal().matrix();
  return detail::zero_block_verdict<Scalar>(k, block(k, a, b), criteria::kMarginal,
                                            model.tolerances().zero);
}

/// Independence given C subset of Y: K^C_AB = K_AB - K_AC K_C^{-1} K_CB = 0.
template <typename Scalar>
CiVerdict test_ci_given_inclusion(const DppModel<Scalar>& model, const CiQuery& q) {
  detail::check_query(q, model.n());
  if (!q.given_excluded.empty()) {
    throw Error(ErrorKind::InvalidQuery, "inclusion test takes no excluded set");
  }
  if (q.given_included.empty()) return test_marginal_independence(model, q.a, q.b);
  if (q.a.empty() || q.b.empty()) return detail::trivial_verdict();
  const auto& k = model.marginal().sym();
  const SymMatrix<Scalar> kc =
      schur_complement(k, q.given_included, model.tolerances().spectrum);
  const IndexSet rest = q.given_included.complement(model.n());
  return detail::zero_block_verdict<Scalar>(
      k.matrix(), block(kc, detail::positions_in(rest, q.a), detail::positions_in(rest, q.b)),
      criteria::kGivenInclusion, model.tolerances().zero);
}

/// Independence given C disjoint from Y: (I-K)^C_AB = 0.
template <typename Scalar>
CiVerdict test_ci_given_exclusion(const DppModel<Scalar>& model, const CiQuery& q) {
  detail::check_query(q, model.n());
  if (!q.given_included.empty()) {
    throw Error(ErrorKind::InvalidQuery, "exclusion test takes no included set");
  }
  if (q.a.empty() || q.b.empty()) return detail::trivial_verdict();
  const int n = model.n();
  const auto ik = SymMatrix<Scalar>::symmetrized(MatrixX<Scalar>::Identity(n, n) -
                                                 model.marginal().matrix());
  const IndexSet rest = q.given_excluded.complement(n);
  const SymMatrix<Scalar> schur =
      schur_complement(ik, q.given_excluded, model.tolerances().spectrum);
  return detail::zero_block_verdict<Scalar>(
      ik.matrix(),
      block(schur, detail::positions_in(rest, q.a), detail::positions_in(rest, q.b)),
      criteria::kGivenExclusion, model.tolerances().zero);
}

/// General query: conditions on the excluded set first, then tests the
/// inclusion criterion on the resulting process.
template <typename Scalar>
CiVerdict test_ci(const DppModel<Scalar>& model, const CiQuery& q) {
  detail::check_query(q, model.n());
  if (q.given_excluded.empty()) return test_ci_given_inclusion(model, q);
  if (q.given_included.empty()) return test_ci_given_exclusion(model, q);
  if (q.a.empty() || q.b.empty()) return detail::trivial_verdict();
  const DppModel<Scalar> excluded = conditional_kernel_exclusion(model, q.given_excluded);
  CiQuery local{excluded.to_local(q.a), excluded.to_local(q.b),
                excluded.to_local(q.given_included), {}};
  CiVerdict v = test_ci_given_inclusion(excluded, local);
  v.criterion = criteria::kGivenEvent;
  return v;
}

/// Y_i and Y_j independent given every other element is in Y iff
/// (K^{-1})_ij = 0. Indices are 0-based.
template <typename Scalar>
CiVerdict test_pairwise_given_rest_included(const DppModel<Scalar>& model, int i, int j) {
  detail::check_pair(i, j, model.n());
  const MatrixX<Scalar> inv = detail::spd_inverse(model.marginal().matrix(), "K");
  MatrixX<Scalar> entry(1, 1);
  entry(0, 0) = inv(i, j);
  return detail::zero_block_verdict<Scalar>(inv, entry, criteria::kPairwiseInverse,
                                            model.tolerances().zero);
}

/// Y_i and Y_j independent given every other element is outside Y iff
/// L_ij = 0. Indices are 0-based.
template <typename Scalar>
CiVerdict test_pairwise_given_rest_excluded(const DppModel<Scalar>& model, int i, int j) {
  detail::check_pair(i, j, model.n());
  const auto& l = model.ensemble().matrix();
  MatrixX<Scalar> entry(1, 1);
  entry(0, 0) = l(i, j);
  return detail::zero_block_verdict<Scalar>(l, entry, criteria::kPairwiseEnsemble,
                                            model.tolerances().zero);
}

/// The 3x3 kernel for which the mixed events (1 in Y, 2 not in Y) and
/// (3 in Y) are independent although K_{{1,2},{3}} is not zero.
struct CounterexampleReport {
  MatrixXd kernel;
  IndexSet left_include, left_exclude, right_include;
  double p_joint = 0.0;  ///< Pr(1 in Y, 2 not in Y, 3 in Y)
  double p_left = 0.0;   ///< Pr(1 in Y, 2 not in Y)
  double p_right = 0.0;  ///< Pr(3 in Y)
  double product = 0.0;
  double factorization_residual = 0.0;
  double oracle_residual = 0.0;
  double block_max_abs = 0.0;
  CiVerdict block_verdict;
  bool checks_pass = false;
};

inline MatrixXd counterexample_kernel() {
  MatrixXd k(3, 3);
  k << 0.05, 0.0, 0.1,
       0.0, 0.8, 0.2,
       0.1, 0.2, 0.6;
  return k;
}

inline CounterexampleReport counterexample_demo() {
  CounterexampleReport r;
  r.kernel = counterexample_kernel();
  const auto model =
      DppModeld::from_marginal(validate_marginal(SymMatrixd::from(r.kernel)));
  r.left_include = IndexSet::from_one_based({1});
  r.left_exclude = IndexSet::from_one_based({2});
  r.right_include = IndexSet::from_one_based({3});
  const Event left(r.left_include, r.left_exclude);
  const Event right(r.right_include, {});

  r.p_joint = mixed_prob(model, left.conjoin(right));
  r.p_left = mixed_prob(model, left);
  r.p_right = inclusion_prob(model, r.right_include);
  r.product = r.p_left * r.p_right;
  r.factorization_residual = std::abs(r.p_joint - r.product);

  const auto table = build_table(model);
  r.oracle_residual = oracle_event_independence(table, left, right, Event{}).residual;

  const IndexSet left_all = r.left_include.unite(r.left_exclude);
  r.block_max_abs = max_abs(block(r.kernel, left_all, r.right_include));
  r.block_verdict = test_marginal_independence(model, left_all, r.right_include);

  constexpr double tol = 1e-12;
  r.checks_pass = std::abs(r.p_joint - 0.006) <= tol && std::abs(r.p_left - 0.01) <= tol &&
                  std::abs(r.p_right - 0.6) <= tol && r.factorization_residual <= tol &&
                  r.oracle_residual <= tol && !r.block_verdict.independent;
  return r;
}

}  // namespace dppci
