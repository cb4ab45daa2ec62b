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

#include "dppci/oracle.hpp"
#include "support/generators.hpp"

using namespace dppci;
using dppci::testing::Rng;

namespace {

IndexSet s1(std::initializer_list<int> one_based) { return IndexSet::from_one_based(one_based); }

MatrixXd chain_l(int n, double diag_value = 2.0, double off = 0.7) {
  MatrixXd l = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) l(i, i) = diag_value;
  for (int i = 0; i + 1 < n; ++i) l(i, i + 1) = l(i + 1, i) = off;
  return l;
}

DppModeld counterexample_model() {
  MatrixXd k(3, 3);
  k << 0.05, 0.0, 0.1, 0.0, 0.8, 0.2, 0.1, 0.2, 0.6;
  return testing::model_from_k(k);
}

}  // namespace

TEST_CASE("build_table on tiny ensembles") {
  MatrixXd one(1, 1);
  one << 1.0;
  const auto t1 = build_table(testing::model_from_l(one));
  CHECK(t1.probs()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t1.probs()[1] == doctest::Approx(0.5).epsilon(1e-15));

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 3;
  const auto t2 = build_table(testing::model_from_l(d));
  const std::vector<double> expected{1.0 / 8, 1.0 / 8, 3.0 / 8, 3.0 / 8};
  for (std::size_t m = 0; m < 4; ++m) CHECK(std::abs(t2.probs()[m] - expected[m]) < 1e-15);
}

TEST_CASE("table of the counterexample kernel") {
  const auto model = counterexample_model();
  const auto t = build_table(model);
  CHECK(std::abs(t.total() - 1.0) < 1e-12);
  CHECK(event_prob(t, Event{}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(event_prob(t, Event(s1({1, 3}), s1({2}))) - 0.006) < 1e-12);
  CHECK(std::abs(event_prob(t, Event(s1({1}), s1({2}))) - mixed_prob(model, Event(s1({1}), s1({2})))) <
        1e-12);
}

TEST_CASE("property: event_prob agrees with mixed_prob on random events") {
  Rng rng(31);
  int checked = 0;
  while (checked < 500) {
    const int n = testing::uniform_int(rng, 1, 8);
    const auto model = testing::model_from_k(testing::random_marginal_matrix(rng, n));
    const auto t = build_table(model);
    for (int rep = 0; rep < 25; ++rep, ++checked) {
      const auto parts = testing::random_partition(rng, n, 2, 1.0);
      const Event e(parts[0], parts[1]);
      CHECK(std::abs(event_prob(t, e) - mixed_prob(model, e)) < 1e-10);
    }
  }
}

TEST_CASE("ground-set cap") {
  const auto model = testing::model_from_l(MatrixXd::Identity(21, 21));
  CHECK_THROWS_AS(build_table(model), Error);
  try {
    build_table(model, 20);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GroundSetTooLarge);
  }
  const auto small = testing::model_from_l(MatrixXd::Identity(4, 4));
  CHECK_THROWS_AS(build_table(small, 3), Error);
}

TEST_CASE("threaded enumeration matches the per-subset formula bit for bit") {
  Rng rng(32);
  const int n = 14;
  const auto model = testing::model_from_l(testing::random_spd(rng, n, 0.2, 2.0));
  const auto t = build_table(model);
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint64_t mask = rng() & ((std::uint64_t{1} << n) - 1);
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1U) members.push_back(i);
    CHECK(t[mask] == exact_prob(model, IndexSet::from_zero_based(members)));
  }
}

TEST_CASE("oracle_process_independence") {
  MatrixXd l = MatrixXd::Zero(4, 4);
  l.topLeftCorner(2, 2) << 2, 0.5, 0.5, 1;
  l.bottomRightCorner(2, 2) << 1.5, -0.4, -0.4, 1;
  const auto blocks = build_table(testing::model_from_l(l));
  const auto v = oracle_process_independence(blocks, s1({1, 2}), s1({3, 4}), Event{});
  CHECK(v.independent);
  CHECK(v.residual < 1e-12);

  const auto chain = build_table(testing::model_from_l(chain_l(3)));
  CHECK(oracle_process_independence(chain, s1({1}), s1({3}), Event({}, s1({2}))).independent);
  CHECK_FALSE(oracle_process_independence(chain, s1({1}), s1({3}), Event{}).independent);

  const auto cx = build_table(counterexample_model());
  const auto dep = oracle_process_independence(cx, s1({1}), s1({3}), Event{});
  CHECK_FALSE(dep.independent);
  CHECK(dep.residual > 1e-6);

  CHECK_THROWS_AS(oracle_process_independence(cx, s1({1}), s1({1, 2}), Event{}), Error);
  CHECK_THROWS_AS(oracle_process_independence(cx, s1({1}), s1({2}), Event(s1({2}), {})),
                  Error);
}

TEST_CASE("oracle_multiway") {
  const auto cx = build_table(counterexample_model());
  CHECK(oracle_multiway(cx, {s1({1, 2, 3})}, Event{}).independent);
  CHECK_THROWS_AS(oracle_multiway(cx, {}, Event{}), Error);

  // Star with center 1 and leaves 2..5.
  MatrixXd star = 3.0 * MatrixXd::Identity(5, 5);
  for (int leaf = 1; leaf < 5; ++leaf) star(0, leaf) = star(leaf, 0) = 0.4 + 0.1 * leaf;
  const auto t = build_table(testing::model_from_l(star));
  const auto given = Event({}, s1({1}));
  const auto v = oracle_multiway(t, {s1({2}), s1({3}), s1({4, 5})}, given);
  CHECK(v.independent);
  CHECK(v.residual < 1e-12);
  CHECK_FALSE(oracle_multiway(t, {s1({2}), s1({3})}, Event{}).independent);

  Rng rng(33);
  const auto dense = build_table(testing::model_from_l(testing::random_spd(rng, 4, 0.5, 3.0)));
  CHECK_FALSE(oracle_multiway(dense, {s1({1, 2}), s1({3, 4})}, Event{}).independent);
}

TEST_CASE("negligible conditioning events are rejected") {
  std::vector<double> point(8, 0.0);
  point[0b011] = 1.0;
  const auto t = JointTabled::from_probabilities(3, point);
  try {
    oracle_process_independence(t, s1({1}), s1({2}), Event(s1({3}), {}));
    FAIL("expected ConditioningEventNegligible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConditioningEventNegligible);
  }
}

TEST_CASE("table invariants are enforced") {
  CHECK_THROWS_AS(JointTabled::from_probabilities(1, {0.5, 0.6}), Error);
  CHECK_THROWS_AS(JointTabled::from_probabilities(1, {1.1, -0.1}), Error);
  CHECK_THROWS_AS(JointTabled::from_probabilities(2, {1.0}), Error);
  const auto t = JointTabled::from_probabilities(1, {1.0 + 5e-13, -5e-13});
  CHECK(t.probs()[1] == 0.0);
}

TEST_CASE("sampling") {
  std::vector<double> point(8, 0.0);
  point[0b101] = 1.0;
  const auto t = JointTabled::from_probabilities(3, point);
  for (const auto& s : sample_many(t, 7, 50)) CHECK(s == s1({1, 3}));

  MatrixXd one(1, 1);
  one << 1.0;
  const auto coin = build_table(testing::model_from_l(one));
  const auto draws = sample_many(coin, 2024, 100000);
  const auto hits = std::count_if(draws.begin(), draws.end(), [](const auto& s) { return !s.empty(); });
  CHECK(std::abs(static_cast<double>(hits) / 1e5 - 0.5) < 0.01);

  CHECK(sample_many(coin, 99, 20) == sample_many(coin, 99, 20));
  CHECK(sample(coin, 5) == sample_many(coin, 5, 1).front());
}

TEST_CASE("property: restriction and complement tables") {
  Rng rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::uniform_int(rng, 1, 8);
    const auto model = testing::model_from_k(testing::random_marginal_matrix(rng, n));
    const auto t = build_table(model);
    const IndexSet a = testing::random_partition(rng, n, 1, 1.0)[0];
    const auto restricted = testing::model_from_k(block(model.marginal().matrix(), a, a));
    const auto expected = build_table(restricted);
    const auto marg = marginalize(t, a);
    for (std::uint64_t m = 0; m < marg.size(); ++m) CHECK(std::abs(marg[m] - expected[m]) < 1e-10);

    const auto comp = build_table(model.complement());
    const auto flipped = complement_table(t);
    for (std::uint64_t m = 0; m < t.size(); ++m) CHECK(std::abs(comp[m] - flipped[m]) < 1e-10);
  }
}
