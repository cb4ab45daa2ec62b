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

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>

namespace dppci {

/// Full distribution of a DPP: probs()[mask] = Pr(Y = S) where bit i of
/// mask is set iff element i (0-based) belongs to S.
template <typename Scalar = double>
class JointTable {
 public:
  static constexpr int kDefaultCap = 20;

  /// Checks the table invariants: entries >= -1e-12 (then clamped to 0)
  /// and a total within 1e-10 of one.
  static JointTable from_probabilities(int n, std::vector<Scalar> probs) {
    if (n < 0 || n > 62 || probs.size() != (std::size_t{1} << n)) {
      throw Error(ErrorKind::InvalidQuery, "table length must be 2^n");
    }
    Scalar total = 0;
    for (Scalar& p : probs) {
      if (!(p >= Scalar(-1e-12))) {
        throw Error(ErrorKind::NumericalFailure, "negative table entry");
      }
      if (p < 0) p = 0;
      total += p;
    }
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-10) {
      throw Error(ErrorKind::NumericalFailure, "table does not sum to one");
    }
    JointTable t;
    t.n_ = n;
    t.probs_ = std::move(probs);
    return t;
  }

  int n() const noexcept { return n_; }
  const std::vector<Scalar>& probs() const noexcept { return probs_; }
  Scalar operator[](std::uint64_t mask) const { return probs_[mask]; }
  std::uint64_t size() const noexcept { return probs_.size(); }

  Scalar total() const {
    Scalar s = 0;
    for (Scalar p : probs_) s += p;
    return s;
  }

 private:
  int n_ = 0;
  std::vector<Scalar> probs_;
};

using JointTabled = JointTable<double>;

namespace detail {

inline std::vector<int> mask_members(std::uint64_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (mask >> i & 1U) out.push_back(i);
  }
  return out;
}

/// Packs the bits of `mask` at the positions listed in `members` into the
/// low bits of the result, in order.
inline std::uint64_t compress(std::uint64_t mask, const std::vector<int>& members) {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    out |= (mask >> members[k] & 1U) << k;
  }
  return out;
}

inline constexpr double kConditioningFloor = 1e-12;
inline constexpr double kOracleTolerance = 1e-9;

}  // namespace detail

/// Evaluates det L_S / det(L + I) for every subset S. Entries are
/// independent, so the work is split across threads without affecting the
/// result.
template <typename Scalar>
JointTable<Scalar> build_table(const DppModel<Scalar>& model,
                               int cap = JointTable<Scalar>::kDefaultCap) {
  const int n = model.n();
  if (n > cap || n > 30) {
    throw Error(ErrorKind::GroundSetTooLarge,
                "ground set of size " + std::to_string(n) + " exceeds cap " +
                    std::to_string(cap));
  }
  const MatrixX<Scalar>& l = model.ensemble().matrix();
  const Scalar norm = determinant(MatrixX<Scalar>(l + MatrixX<Scalar>::Identity(n, n)));
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<Scalar> probs(count);

  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const std::vector<int> members = detail::mask_members(mask, n);
      probs[mask] = determinant(MatrixX<Scalar>(l(members, members))) / norm;
    }
  };

  const unsigned workers =
      n >= 14 ? std::max(1U, std::min(8U, std::thread::hardware_concurrency())) : 1U;
  if (workers == 1) {
    fill(0, count);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(count, begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return JointTable<Scalar>::from_probabilities(n, std::move(probs));
}

/// Sum of Pr(Y = S) over all S consistent with the event.
template <typename Scalar>
Scalar event_prob(const JointTable<Scalar>& t, const Event& e) {
  e.include().check_within(t.n());
  e.exclude().check_within(t.n());
  const std::uint64_t in = e.include().mask();
  const std::uint64_t out = e.exclude().mask();
  Scalar sum = 0;
  for (std::uint64_t mask = 0; mask < t.size(); ++mask) {
    if ((mask & in) == in && (mask & out) == 0) sum += t[mask];
  }
  return sum;
}

/// Table of Y restricted to A, indexed by masks over the sorted members of A.
template <typename Scalar>
JointTable<Scalar> marginalize(const JointTable<Scalar>& t, const IndexSet& a) {
  a.check_within(t.n());
  std::vector<Scalar> probs(std::size_t{1} << a.size(), Scalar(0));
  for (std::uint64_t mask = 0; mask < t.size(); ++mask) {
    probs[detail::compress(mask, a.members())] += t[mask];
  }
  return JointTable<Scalar>::from_probabilities(static_cast<int>(a.size()),
                                                std::move(probs));
}

/// Table of the complementary process: entry S moves to the complement of S.
template <typename Scalar>
JointTable<Scalar> complement_table(const JointTable<Scalar>& t) {
  const std::uint64_t full = t.size() - 1;
  std::vector<Scalar> probs(t.size());
  for (std::uint64_t mask = 0; mask < t.size(); ++mask) probs[full ^ mask] = t[mask];
  return JointTable<Scalar>::from_probabilities(t.n(), std::move(probs));
}

struct OracleVerdict {
  bool independent = true;
  /// Largest |P(joint | given) - product of conditional marginals|.
  double residual = 0.0;
  double tolerance = detail::kOracleTolerance;
};

namespace detail {

template <typename Scalar>
Scalar conditioning_mass(const JointTable<Scalar>& t, const Event& given) {
  const Scalar pg = event_prob(t, given);
  if (!(pg > kConditioningFloor)) {
    throw Error(ErrorKind::ConditioningEventNegligible,
                "conditioning event has probability below 1e-12");
  }
  return pg;
}

}  // namespace detail

/// Conditional factorization of the restrictions Y_{A_1}, ..., Y_{A_k}
/// given an event, checked over every joint configuration.
template <typename Scalar>
OracleVerdict oracle_multiway(const JointTable<Scalar>& t, const std::vector<IndexSet>& parts,
                              const Event& given, double tol = detail::kOracleTolerance) {
  if (parts.empty()) throw Error(ErrorKind::EmptyQuerySet, "no parts given");
  std::vector<IndexSet> all = parts;
  all.push_back(given.include());
  all.push_back(given.exclude());
  require_pairwise_disjoint(all);
  for (const auto& p : parts) p.check_within(t.n());
  const Scalar pg = detail::conditioning_mass(t, given);

  const std::uint64_t in = given.include().mask();
  const std::uint64_t out = given.exclude().mask();
  std::vector<int> offsets;
  int width = 0;
  for (const auto& p : parts) {
    offsets.push_back(width);
    width += static_cast<int>(p.size());
  }
  if (width > 26) throw Error(ErrorKind::GroundSetTooLarge, "parts too large");

  std::vector<Scalar> joint(std::size_t{1} << width, Scalar(0));
  std::vector<std::vector<Scalar>> marg(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    marg[k].assign(std::size_t{1} << parts[k].size(), Scalar(0));
  }
  for (std::uint64_t mask = 0; mask < t.size(); ++mask) {
    if ((mask & in) != in || (mask & out) != 0) continue;
    const Scalar p = t[mask] / pg;
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const std::uint64_t local = detail::compress(mask, parts[k].members());
      key |= local << offsets[k];
      marg[k][local] += p;
    }
    joint[key] += p;
  }

  OracleVerdict v;
  v.tolerance = tol;
  for (std::uint64_t key = 0; key < joint.size(); ++key) {
    Scalar product = 1;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const std::uint64_t local =
          key >> offsets[k] & ((std::uint64_t{1} << parts[k].size()) - 1);
      product *= marg[k][local];
    }
    v.residual = std::max(v.residual, static_cast<double>(std::abs(joint[key] - product)));
  }
  v.independent = v.residual <= tol;
  return v;
}

/// Y_A and Y_B independent given the event, over all A_1 of A and B_1 of B.
template <typename Scalar>
OracleVerdict oracle_process_independence(const JointTable<Scalar>& t, const IndexSet& a,
                                          const IndexSet& b, const Event& given,
                                          double tol = detail::kOracleTolerance) {
  return oracle_multiway(t, {a, b}, given, tol);
}

/// |P(E1 and E2 | given) - P(E1 | given) P(E2 | given)| for two events.
template <typename Scalar>
OracleVerdict oracle_event_independence(const JointTable<Scalar>& t, const Event& first,
                                        const Event& second, const Event& given,
                                        double tol = detail::kOracleTolerance) {
  const Scalar pg = detail::conditioning_mass(t, given);
  const Event both = first.conjoin(second);
  const double joint = static_cast<double>(event_prob(t, both.conjoin(given)) / pg);
  const double p1 = static_cast<double>(event_prob(t, first.conjoin(given)) / pg);
  const double p2 = static_cast<double>(event_prob(t, second.conjoin(given)) / pg);
  OracleVerdict v;
  v.tolerance = tol;
  v.residual = std::abs(joint - p1 * p2);
  v.independent = v.residual <= tol;
  return v;
}

/// Inverse-CDF draws from a table, reproducible for a given seed.
template <typename Scalar = double>
class TableSampler {
 public:
  TableSampler(const JointTable<Scalar>& t, std::uint64_t seed) : t_(t), rng_(seed) {}

  IndexSet next() {
    // 53 random bits mapped to [0, 1), independent of the standard library's
    // distribution implementations.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    double cumulative = 0.0;
    std::uint64_t chosen = 0;
    for (std::uint64_t mask = 0; mask < t_.size(); ++mask) {
      const double p = static_cast<double>(t_[mask]);
      if (p <= 0.0) continue;
      chosen = mask;
      cumulative += p;
      if (u < cumulative) break;
    }
    // If roundoff leaves u above the final sum, the last support point is kept.
    return IndexSet::from_zero_based(detail::mask_members(chosen, t_.n()));
  }

 private:
  const JointTable<Scalar>& t_;
  std::mt19937_64 rng_;
};

template <typename Scalar>
IndexSet sample(const JointTable<Scalar>& t, std::uint64_t seed) {
  return TableSampler<Scalar>(t, seed).next();
}

template <typename Scalar>
std::vector<IndexSet> sample_many(const JointTable<Scalar>& t, std::uint64_t seed,
                                  std::size_t count) {
  TableSampler<Scalar> sampler(t, seed);
  std::vector<IndexSet> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sampler.next());
  return out;
}

}  // namespace dppci
