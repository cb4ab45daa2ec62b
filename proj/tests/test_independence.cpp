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

#include "doctest.h"

#include "dppci/independence.hpp"
#include "support/generators.hpp"

using namespace dppci;
using dppci::testing::Rng;

namespace {

IndexSet s1(std::initializer_list<int> one_based) { return IndexSet::from_one_based(one_based); }

DppModeld counterexample_model() { return testing::model_from_k(counterexample_kernel()); }

MatrixXd chain_l(int n) {
  MatrixXd l = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) l(i, i) = 1.5 + 0.25 * i;
  for (int i = 0; i + 1 < n; ++i) l(i, i + 1) = l(i + 1, i) = 0.6 - 0.1 * i;
  return l;
}

/// Draws nonempty disjoint A and B plus a conditioning set C.
struct Triple {
  IndexSet a, b, c;
};

Triple random_triple(Rng& rng, int n) {
  while (true) {
    auto p = testing::random_partition(rng, n, 3, 0.7);
    if (!p[0].empty() && !p[1].empty()) return {p[0], p[1], p[2]};
  }
}

}  // namespace

TEST_CASE("marginal independence on the counterexample kernel") {
  const auto model = counterexample_model();
  const auto v12 = test_marginal_independence(model, s1({1}), s1({2}));
  CHECK(v12.independent);
  CHECK(v12.criterion_value == 0.0);
  CHECK(v12.criterion == std::string(criteria::kMarginal));
  const auto v13 = test_marginal_independence(model, s1({1}), s1({3}));
  CHECK_FALSE(v13.independent);
  CHECK(v13.criterion_value == doctest::Approx(0.1));
  CHECK(v13.tolerance_used == doctest::Approx(1e-9 * 0.8));

  MatrixXd d = MatrixXd::Zero(3, 3);
  d.diagonal() << 0.2, 0.5, 0.7;
  const auto diag_model = testing::model_from_k(d);
  CHECK(test_marginal_independence(diag_model, s1({1}), s1({2, 3})).independent);
  CHECK(test_marginal_independence(diag_model, s1({1, 3}), s1({2})).independent);
}

TEST_CASE("degenerate and malformed queries") {
  const auto model = counterexample_model();
  const auto trivial = test_marginal_independence(model, IndexSet{}, s1({2}));
  CHECK(trivial.independent);
  CHECK(trivial.criterion_value == 0.0);
  CHECK_THROWS_AS(test_marginal_independence(model, s1({1}), s1({1})), Error);
  CHECK_THROWS_AS(test_ci_given_inclusion(model, {s1({1}), s1({2}), {}, s1({3})}), Error);
  CHECK_THROWS_AS(test_ci_given_exclusion(model, {s1({1}), s1({2}), s1({3}), {}}), Error);
  CHECK_THROWS_AS(test_pairwise_given_rest_included(model, 1, 1), Error);
  CHECK_THROWS_AS(test_pairwise_given_rest_excluded(model, 0, 3), Error);
  CHECK_THROWS_AS(test_ci(model, {s1({1}), s1({2}), s1({2}), {}}), Error);
}

TEST_CASE("conditional independence given inclusion") {
  const auto model = counterexample_model();
  const auto empty_c = test_ci_given_inclusion(model, {s1({1}), s1({3}), {}, {}});
  const auto marginal = test_marginal_independence(model, s1({1}), s1({3}));
  CHECK(empty_c.independent == marginal.independent);
  CHECK(empty_c.criterion_value == marginal.criterion_value);

  const auto v = test_ci_given_inclusion(model, {s1({1}), s1({2}), s1({3}), {}});
  CHECK_FALSE(v.independent);
  CHECK(v.criterion_value == doctest::Approx(1.0 / 30).epsilon(1e-13));
  const auto t = build_table(model);
  CHECK_FALSE(oracle_process_independence(t, s1({1}), s1({2}), Event(s1({3}), {})).independent);

  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testing::uniform_int(rng, 3, 7);
    const auto tr = random_triple(rng, n);
    const auto pos = testing::model_from_k(testing::k_with_schur_zero(rng, n, tr.a, tr.b, tr.c));
    CHECK(test_ci_given_inclusion(pos, {tr.a, tr.b, tr.c, {}}).independent);
    const auto table = build_table(pos);
    CHECK(oracle_process_independence(table, tr.a, tr.b, Event(tr.c, {})).independent);
  }
}

TEST_CASE("conditional independence given exclusion") {
  const auto cx = counterexample_model();
  for (const auto& [a, b] : {std::pair{s1({1}), s1({2})}, std::pair{s1({1}), s1({3})}}) {
    const auto v = test_ci_given_exclusion(cx, {a, b, {}, {}});
    CHECK(v.independent == test_marginal_independence(cx, a, b).independent);
  }

  const auto chain = testing::model_from_l(chain_l(3));
  CHECK(test_ci_given_exclusion(chain, {s1({1}), s1({3}), {}, s1({2})}).independent);
  CHECK(oracle_process_independence(build_table(chain), s1({1}), s1({3}), Event({}, s1({2})))
            .independent);

  const auto v = test_ci_given_exclusion(cx, {s1({1}), s1({3}), {}, s1({2})});
  const auto o =
      oracle_process_independence(build_table(cx), s1({1}), s1({3}), Event({}, s1({2})));
  CHECK(v.independent == o.independent);
  CHECK_FALSE(v.independent);
}

TEST_CASE("pairwise tests") {
  MatrixXd d = MatrixXd::Zero(3, 3);
  d.diagonal() << 0.2, 0.5, 0.7;
  const auto diag_model = testing::model_from_k(d);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        CHECK(test_pairwise_given_rest_included(diag_model, i, j).independent);
        CHECK(test_pairwise_given_rest_excluded(diag_model, i, j).independent);
      }

  const auto cx = counterexample_model();
  const auto inv = test_pairwise_given_rest_included(cx, 0, 1);
  const auto schur = test_ci_given_inclusion(cx, {s1({1}), s1({2}), s1({3}), {}});
  CHECK(inv.independent == schur.independent);
  CHECK(inv.criterion == std::string(criteria::kPairwiseInverse));

  const auto chain = testing::model_from_l(chain_l(3));
  CHECK(test_pairwise_given_rest_excluded(chain, 0, 2).independent);
  CHECK_FALSE(test_pairwise_given_rest_excluded(chain, 0, 1).independent);
  const auto t = build_table(chain);
  CHECK(oracle_process_independence(t, s1({1}), s1({3}), Event({}, s1({2}))).independent);
  CHECK_FALSE(oracle_process_independence(t, s1({1}), s1({2}), Event({}, s1({3}))).independent);
}

TEST_CASE("counterexample demo") {
  const auto r = counterexample_demo();
  CHECK(std::abs(r.p_joint - 0.006) <= 1e-12);
  CHECK(std::abs(r.p_left - 0.01) <= 1e-12);
  CHECK(std::abs(r.p_right - 0.6) <= 1e-12);
  CHECK(r.factorization_residual <= 1e-12);
  CHECK(r.oracle_residual <= 1e-12);
  CHECK(r.block_max_abs == 0.2);
  CHECK_FALSE(r.block_verdict.independent);
  CHECK(r.checks_pass);
}

TEST_CASE("property: kernel verdicts agree with the oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = testing::uniform_int(rng, 2, 7);
    const auto tr = random_triple(rng, n);
    const int kind = trial % 3;
    MatrixXd k;
    if (kind == 0) k = testing::k_with_schur_zero(rng, n, tr.a, tr.b, tr.c);
    if (kind == 1) k = testing::k_with_schur_zero(rng, n, tr.a, tr.b, tr.c, 0.5);
    if (kind == 2) k = testing::random_marginal_matrix(rng, n);
    const auto model = testing::model_from_k(k);
    const auto table = build_table(model);

    const auto kernel = test_ci_given_inclusion(model, {tr.a, tr.b, tr.c, {}});
    const Event given(tr.c, {});
    CHECK(kernel.independent == oracle_process_independence(table, tr.a, tr.b, given).independent);
    // Event-level forms decided by the same block.
    CHECK(kernel.independent ==
          oracle_event_independence(table, Event(tr.a, {}), Event(tr.b, {}), given).independent);
    CHECK(kernel.independent ==
          oracle_event_independence(table, Event(tr.a, {}), Event({}, tr.b), given).independent);
    CHECK(kernel.independent ==
          oracle_event_independence(table, Event({}, tr.a), Event({}, tr.b), given).independent);
    if (kind == 0) CHECK(kernel.independent);
    if (kind == 1) CHECK_FALSE(kernel.independent);

    // Complement symmetry of the marginal test.
    CHECK(test_marginal_independence(model, tr.a, tr.b).independent ==
          test_marginal_independence(model.complement(), tr.a, tr.b).independent);
  }
}

TEST_CASE("property: exclusion and mixed conditioning agree with the oracle") {
  Rng rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = testing::uniform_int(rng, 3, 7);
    auto p = testing::random_partition(rng, n, 4, 0.5);
    if (p[0].empty() || p[1].empty()) continue;
    const IndexSet& a = p[0];
    const IndexSet& b = p[1];
    const IndexSet& excl = p[2];
    const IndexSet& incl = p[3];
    MatrixXd k = trial % 2 == 0 ? testing::k_with_exclusion_zero(rng, n, a, b, excl)
                                : testing::random_marginal_matrix(rng, n);
    const auto model = testing::model_from_k(k);
    const auto table = build_table(model);
    const auto ve = test_ci_given_exclusion(model, {a, b, {}, excl});
    CHECK(ve.independent == oracle_process_independence(table, a, b, Event({}, excl)).independent);
    if (trial % 2 == 0) CHECK(ve.independent);

    const auto vm = test_ci(model, {a, b, incl, excl});
    CHECK(vm.independent == oracle_process_independence(table, a, b, Event(incl, excl)).independent);
  }
}

TEST_CASE("property: pairwise inverse test agrees with the Schur test") {
  Rng rng(44);
  int agreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::uniform_int(rng, 2, 7);
    const int i = testing::uniform_int(rng, 0, n - 1);
    int j = testing::uniform_int(rng, 0, n - 2);
    if (j >= i) ++j;
    const IndexSet a = IndexSet::from_zero_based({i});
    const IndexSet b = IndexSet::from_zero_based({j});
    const IndexSet rest = a.unite(b).complement(n);
    const MatrixXd k = trial % 2 ? testing::k_with_schur_zero(rng, n, a, b, rest)
                                 : testing::random_marginal_matrix(rng, n);
    const auto model = testing::model_from_k(k);
    const bool pairwise = test_pairwise_given_rest_included(model, i, j).independent;
    const bool schur = test_ci_given_inclusion(model, {a, b, rest, {}}).independent;
    CHECK(pairwise == schur);
    if (trial % 2) CHECK(pairwise);
    agreements += pairwise == schur;
  }
  CHECK(agreements == 200);
}
