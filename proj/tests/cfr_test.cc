// Copyright 2026 The dreamcfr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dreamcfr/errors.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/random.h"
#include "dreamcfr/tabular_cfr.h"
#include "test_util.h"

namespace dreamcfr {
namespace {

using V = std::vector<double>;

TEST_CASE("regret matching") {
  CHECK(RegretMatching(V{2, 1, 1}, RegretMatchingMode::kUniform) ==
        V{0.5, 0.25, 0.25});
  CHECK(RegretMatching(V{2, 1, 1}, RegretMatchingMode::kArgmax) ==
        V{0.5, 0.25, 0.25});
  CHECK(RegretMatching(V{-1, -2}, RegretMatchingMode::kUniform) == V{0.5, 0.5});
  CHECK(RegretMatching(V{-1, -2}, RegretMatchingMode::kArgmax) == V{1, 0});
  CHECK(RegretMatching(V{0, 0}, RegretMatchingMode::kArgmax) == V{1, 0});
  CHECK(RegretMatching(V{-3, -1, -1}, RegretMatchingMode::kArgmax) ==
        V{0, 1, 0});
  CHECK_THROWS_AS(RegretMatching(V{NAN, 1}, RegretMatchingMode::kUniform),
                  InvalidInputError);
  CHECK_THROWS_AS(RegretMatching(V{}, RegretMatchingMode::kUniform),
                  InvalidInputError);
}

TEST_CASE("regret matching is scale invariant and a distribution") {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + rng.UniformInt(3);
    V r(n);
    for (double& x : r) x = (rng.Uniform() - 0.5) * std::pow(10.0, rng.UniformInt(6) - 2);
    const double c = std::pow(10.0, rng.Uniform() * 6 - 3);
    V scaled = r;
    for (double& x : scaled) x *= c;
    for (auto mode : {RegretMatchingMode::kUniform, RegretMatchingMode::kArgmax}) {
      const V p = RegretMatching(r, mode);
      const V q = RegretMatching(scaled, mode);
      double total = 0.0;
      for (int a = 0; a < n; ++a) {
        CHECK(p[a] >= 0.0);
        CHECK(std::abs(p[a] - q[a]) < 1e-12);
        total += p[a];
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

// Depth-1 matrix game: row player 0, column player 1 without observation.
GameTree MatrixGame(const std::array<std::array<double, 2>, 2>& payoff) {
  const std::vector<ActionType> two{ActionType::kCall, ActionType::kRaise};
  TreeSpec root;
  root.kind = NodeKind::kDecision;
  root.player = 0;
  root.key.agent = 0;
  root.legal = two;
  for (int r = 0; r < 2; ++r) {
    TreeSpec col;
    col.kind = NodeKind::kDecision;
    col.player = 1;
    col.key.agent = 1;
    col.legal = two;
    for (int c = 0; c < 2; ++c) {
      TreeSpec leaf;
      leaf.payoff0 = payoff[r][c];
      col.children.push_back(leaf);
    }
    root.children.push_back(col);
  }
  return GameTree::FromSpec(root);
}

TEST_CASE("first iteration on a matrix game") {
  GameTree tree = MatrixGame({{{3, -1}, {-2, 1}}});
  CfrTables tables;
  const auto values =
      CfrIteration(tree, tables, 1, Weighting::kVanilla, UpdateMode::kSimultaneous);
  CHECK(values[0] == doctest::Approx(0.25));
  const V r0 = tables.regrets[0].Get(tree.infosets()[0].key, 2);
  const V r1 = tables.regrets[1].Get(tree.infosets()[1].key, 2);
  CHECK(r0[0] == doctest::Approx(0.75));
  CHECK(r0[1] == doctest::Approx(-0.75));
  CHECK(r1[0] == doctest::Approx(-0.25));
  CHECK(r1[1] == doctest::Approx(0.25));
  // Iteration 1 plays uniform everywhere.
  const auto* avg = tables.averages[0].Find(tree.infosets()[0].key);
  REQUIRE(avg != nullptr);
  CHECK(avg->policy_sum == V{0.5, 0.5});
  CHECK(avg->weight_sum == 1.0);
}

TEST_CASE("alternating updates touch one player per iteration") {
  GameTree tree = MatrixGame({{{3, -1}, {-2, 1}}});
  CfrTables tables;
  CfrIteration(tree, tables, 1, Weighting::kVanilla, UpdateMode::kAlternating);
  CHECK(tables.regrets[1].Get(tree.infosets()[1].key, 2) != V{0, 0});
  CHECK(tables.regrets[0].Get(tree.infosets()[0].key, 2) == V{0, 0});
  CfrIteration(tree, tables, 2, Weighting::kVanilla, UpdateMode::kAlternating);
  CHECK(tables.regrets[0].Get(tree.infosets()[0].key, 2) != V{0, 0});
  CHECK_THROWS_AS(CfrIteration(tree, tables, 0, Weighting::kVanilla,
                               UpdateMode::kAlternating),
                  InvalidInputError);
}

TEST_CASE("linear weighting of a constant regret") {
  RegretTable table;
  InfostateKey key;
  for (int t = 1; t <= 3; ++t) {
    table.Accumulate(key, V{1.0}, IterationWeight(Weighting::kLinear, t));
  }
  CHECK(table.Get(key, 1)[0] == 6.0);
  CHECK(table.Get(InfostateKey{GameId::kLeduc}, 2) == V{0, 0});
}

TEST_CASE("average policy") {
  InfostateKey key;
  AvgPolicyAccumulator acc;
  acc.Add(key, V{1, 0}, 1.0);
  acc.Add(key, V{0, 1}, 1.0);
  CHECK(*AveragePolicy(acc).Find(key) == V{0.5, 0.5});

  AvgPolicyAccumulator linear;
  linear.Add(key, V{1, 0}, 1.0);
  linear.Add(key, V{0, 1}, 2.0);
  const V p = *AveragePolicy(linear).Find(key);
  CHECK(p[0] == doctest::Approx(1.0 / 3));
  CHECK(p[1] == doctest::Approx(2.0 / 3));

  AvgPolicyAccumulator unvisited;
  unvisited.Slot(key, 3);
  CHECK(*AveragePolicy(unvisited).Find(key) == V{1.0 / 3, 1.0 / 3, 1.0 / 3});
  const std::vector<ActionType> legal{ActionType::kCall, ActionType::kRaise};
  CHECK(AveragePolicy(unvisited).ActionProbabilities(InfostateKey{GameId::kLeduc}, legal) ==
        V{0.5, 0.5});
}

TEST_CASE("accumulator invariants on kuhn") {
  CfrSolver solver(GameTree::Build(GameId::kKuhn), Weighting::kLinear,
                   UpdateMode::kAlternating);
  solver.RunIterations(200);
  for (const auto& acc : solver.tables().averages) {
    for (const auto& [key, e] : acc.table()) {
      CHECK(e.weight_sum >= 0.0);
      for (double s : e.policy_sum) {
        CHECK(s >= 0.0);
        CHECK(s <= e.weight_sum * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("kuhn convergence") {
  for (UpdateMode mode : {UpdateMode::kSimultaneous, UpdateMode::kAlternating}) {
    CfrSolver solver(GameTree::Build(GameId::kKuhn), Weighting::kVanilla, mode);
    solver.RunIterations(10000);
    const ExploitabilityResult e =
        Exploitability(solver.tree(), solver.AveragePolicy());
    CHECK(e.total_chips < 1.0);  // 1% of the ante
  }
}

TEST_CASE("kuhn exploitability decreases on a log grid") {
  CfrSolver solver(GameTree::Build(GameId::kKuhn), Weighting::kVanilla,
                   UpdateMode::kSimultaneous);
  double previous = 1e300;
  for (int k = 0; k < 10; ++k) {
    const int target = static_cast<int>(std::round(std::pow(10.0, 1 + k * 3.0 / 9)));
    solver.RunIterations(target - solver.iteration());
    const double e = Exploitability(solver.tree(), solver.AveragePolicy()).mbb;
    CHECK(e <= previous * 1.05);
    previous = e;
  }
}

TEST_CASE("kuhn game value approaches the equilibrium value") {
  CfrSolver solver(GameTree::Build(GameId::kKuhn), Weighting::kVanilla,
                   UpdateMode::kSimultaneous);
  solver.RunIterations(1000);
  const double e1000 = Exploitability(solver.tree(), solver.AveragePolicy()).mbb;
  solver.RunIterations(99000);
  const double e = Exploitability(solver.tree(), solver.AveragePolicy()).mbb;
  CHECK(e < e1000);
  const double value = ExpectedValue(solver.tree(), solver.AveragePolicy());
  CHECK(std::abs(value - testing::kKuhnValueP0) / 100.0 < 2e-3);
}

}  // namespace
}  // namespace dreamcfr
