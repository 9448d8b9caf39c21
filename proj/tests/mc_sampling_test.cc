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
#include <map>
#include <vector>

#include "doctest.h"
#include "dreamcfr/errors.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/mc_sampling.h"
#include "test_util.h"

namespace dreamcfr {
namespace {

using testing::EnumeratingSampler;
using testing::ScriptedSampler;
using V = std::vector<double>;

class HashBaseline : public BaselineSource {
 public:
  void Values(const GameState& state, std::span<const ActionType> legal,
              int traverser, std::span<double> out) const override {
    const size_t h = InfostateKeyHash{}(JointKeyOf(state));
    for (size_t a = 0; a < legal.size(); ++a) {
      out[a] = static_cast<double>((h >> (3 * a)) % 1000) / 5.0 - 100.0 +
               17.0 * traverser;
    }
  }
};

TEST_CASE("sampling policy") {
  CHECK(SamplingPolicy(V{1, 0}, 0.5, true) == V{0.75, 0.25});
  CHECK(SamplingPolicy(V{0.3, 0.7}, 0.9, false) == V{0.3, 0.7});
  CHECK(SamplingPolicy(V{0.3, 0.7}, 0.0, true) == V{0.3, 0.7});
  CHECK_THROWS_AS(SamplingPolicy(V{1, 0}, 1.5, true), InvalidInputError);
  CHECK_THROWS_AS(SamplingPolicy(V{1, 0}, -0.1, true), InvalidInputError);
  for (double eps : {0.01, 0.5, 1.0}) {
    for (double x : SamplingPolicy(V{1, 0, 0}, eps, true)) CHECK(x > 0.0);
  }
}

TEST_CASE("baseline table") {
  BaselineTable table;
  InfostateKey key;
  key.agent = kJointAgent;
  CHECK(table.Get(key, 0).mean == 0.0);
  CHECK(table.Get(key, 0).count == 0);
  table.Update(key, 0, 10.0, 0);
  CHECK(table.Get(key, 0).mean == 10.0);
  CHECK(table.Get(key, 0).count == 1);
  table.Update(key, 0, 0.0, 0);
  CHECK(table.Get(key, 0).mean == 5.0);
  CHECK(table.Get(key, 0).count == 2);
  table.Update(key, 1, 4.0, 1);  // stored for player 0
  CHECK(table.Get(key, 1).mean == -4.0);
}

// Deal index for the given Kuhn private cards.
int64_t KuhnDeal(int c0, int c1) {
  const GameState root = GameState::Initial(GameId::kKuhn);
  const auto outcomes = ChanceOutcomes(root);
  for (size_t k = 0; k < outcomes.size(); ++k) {
    GameState s = Apply(root, outcomes[k]);
    if (s.hole(0, 0) == c0 && s.hole(1, 0) == c1) return k;
  }
  return -1;
}

TEST_CASE("outcome sampling hand traces") {
  UniformPolicy uniform;
  ZeroBaseline zero;
  const GameState root = GameState::Initial(GameId::kKuhn);
  // Jack vs queen, traverser bets (xi = 0.5), opponent calls (pi = 0.5).
  {
    ScriptedSampler s({KuhnDeal(0, 1), 1, 1});
    TrajectoryRecord r = OsTraverse(root, 0, uniform, 0.5, zero, s);
    REQUIRE(r.steps.size() == 2);
    CHECK(r.terminal_reward == -200.0);
    CHECK(r.steps[1].action_values == V{0.0, -400.0});
    CHECK(r.steps[1].value == -200.0);
    CHECK(r.steps[0].action_values == V{0.0, -400.0});
    CHECK(r.steps[0].value == -200.0);
    CHECK(r.steps[0].traverser_reach_before == 1.0);
    CHECK(r.steps[0].traverser_reach_after == 0.5);
    CHECK(r.steps[1].traverser_reach_after == 0.5);
    CHECK(r.root_value == -200.0);
    CHECK(r.nodes_touched == 4);
  }
  // King vs jack, traverser checks with epsilon 0.2 under a betting policy.
  {
    PreferencePolicy bettor({ActionType::kRaise, ActionType::kCall});
    ScriptedSampler s({KuhnDeal(2, 0), 0, 1, 1});
    TrajectoryRecord r = OsTraverse(root, 0, bettor, 0.2, zero, s);
    REQUIRE(r.steps.size() == 3);
    CHECK(r.steps[0].sample_prob == doctest::Approx(0.1));
    CHECK(r.steps[2].sample_prob == doctest::Approx(0.9));
    CHECK(r.terminal_reward == 200.0);
    // Call at the last step: 200 / 0.9; policy plays it with probability 1.
    CHECK(r.steps[2].action_values[1] == doctest::Approx(200.0 / 0.9));
    CHECK(r.steps[2].value == doctest::Approx(200.0 / 0.9));
    CHECK(r.steps[1].value == doctest::Approx(200.0 / 0.9));
    // Checking is off-policy: its estimate is large but carries no weight.
    CHECK(r.steps[0].action_values[0] == doctest::Approx(2000.0 / 0.9));
    CHECK(r.steps[0].value == doctest::Approx(0.0));
    CHECK(r.steps[2].traverser_reach_after == doctest::Approx(0.1 * 0.9));
  }
}

TEST_CASE("baseline-adjusted sampled value") {
  class Fixed : public BaselineSource {
   public:
    void Values(const GameState&, std::span<const ActionType>, int,
                std::span<double> out) const override {
      std::fill(out.begin(), out.end(), 3.0);
    }
  } three;
  PreferencePolicy caller({ActionType::kCall});
  // Kuhn Q vs J, traverser 0 checks (xi 0.5 under epsilon 1), opponent checks.
  ScriptedSampler s({KuhnDeal(1, 0), 0, 0});
  TrajectoryRecord r =
      OsTraverse(GameState::Initial(GameId::kKuhn), 0, UniformPolicy(), 1.0, three, s);
  REQUIRE(r.steps.size() == 2);
  CHECK(r.terminal_reward == 100.0);
  // Opponent node: 3 + (100 - 3) / 0.5 = 197 sampled, 3 otherwise.
  CHECK(r.steps[1].action_values == V{197.0, 3.0});
  CHECK(r.steps[1].value == 100.0);
  CHECK(r.steps[0].action_values == V{3.0 + (100.0 - 3.0) / 0.5, 3.0});
  (void)caller;
}

TEST_CASE("sample reach is the product of traverser probabilities") {
  Rng rng(3);
  RngSampler sampler(rng);
  UniformPolicy uniform;
  ZeroBaseline zero;
  for (int k = 0; k < 500; ++k) {
    const int traverser = k % 2;
    TrajectoryRecord r = OsTraverse(GameState::Initial(GameId::kLeduc),
                                    traverser, uniform, 0.3, zero, sampler);
    double reach = 1.0;
    for (const TrajectoryStep& step : r.steps) {
      CHECK(step.traverser_reach_before == reach);
      if (step.actor == traverser) reach *= step.sample_prob;
      CHECK(step.traverser_reach_after == reach);
      CHECK(step.sample_prob > 0.0);
      CHECK(step.sample_prob <= 1.0);
    }
  }
}

TEST_CASE("zero-probability sample is an error") {
  PreferencePolicy raiser({ActionType::kRaise});
  ScriptedSampler s({KuhnDeal(0, 1), 0});
  CHECK_THROWS_AS(OsTraverse(GameState::Initial(GameId::kKuhn), 0, raiser, 0.0,
                             ZeroBaseline(), s),
                  SamplingError);
}

// Exhaustive expectation of the traverser's estimates, conditioned on
// reaching each infostate.
std::map<InfostateKey, V> EnumeratedOsExpectation(const GameState& root,
                                                  int traverser,
                                                  const PolicySource& policy,
                                                  double epsilon,
                                                  const BaselineSource& baseline) {
  std::map<InfostateKey, V> sum;
  std::map<InfostateKey, double> mass;
  EnumeratingSampler::ForEachPath([&](EnumeratingSampler& s) {
    TrajectoryRecord r = OsTraverse(root, traverser, policy, epsilon, baseline, s);
    const double p = s.probability();
    for (const TrajectoryStep& step : r.steps) {
      if (step.actor != traverser) continue;
      V& acc = sum[step.key];
      acc.resize(step.legal.size(), 0.0);
      for (size_t a = 0; a < acc.size(); ++a) acc[a] += p * step.action_values[a];
      mass[step.key] += p;
    }
  });
  for (auto& [key, acc] : sum) {
    for (double& x : acc) x /= mass[key];
  }
  return sum;
}

TEST_CASE("outcome sampling is unbiased on kuhn") {
  const GameTree tree = GameTree::Build(GameId::kKuhn);
  UniformPolicy uniform;
  FunctionPolicy skewed([](const InfostateKey& key, std::span<const ActionType> legal) {
    V p(legal.size(), 0.0);
    p[0] = 0.25 + 0.2 * key.holes[2 * key.agent];
    p[1] = 1 - p[0];
    return p;
  });
  BaselineTable running;
  Rng rng(11);
  RngSampler sampler(rng);
  for (int k = 0; k < 300; ++k) {
    UpdateBaselines(running, OsTraverse(GameState::Initial(GameId::kKuhn), k % 2,
                                        uniform, 0.5, ZeroBaseline(), sampler));
  }
  CHECK(running.size() > 0);
  ZeroBaseline zero;
  HashBaseline hashed;
  for (const PolicySource* policy : std::vector<const PolicySource*>{&uniform, &skewed}) {
    for (const BaselineSource* baseline :
         std::vector<const BaselineSource*>{&zero, &running, &hashed}) {
      for (int traverser = 0; traverser < 2; ++traverser) {
        const auto oracle = testing::ComputeCounterfactualValues(tree, *policy, traverser);
        const auto estimate = EnumeratedOsExpectation(
            GameState::Initial(GameId::kKuhn), traverser, *policy, 0.5, *baseline);
        CHECK(estimate.size() == oracle.action_values.size());
        for (const auto& [key, values] : estimate) {
          const V& truth = oracle.action_values.at(key);
          for (size_t a = 0; a < values.size(); ++a) {
            CHECK(std::abs(values[a] - truth[a]) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("oracle baseline gives zero variance") {
  UniformPolicy uniform;
  OracleBaseline oracle(uniform);
  const GameState root = GameState::Initial(GameId::kKuhn);
  for (int traverser = 0; traverser < 2; ++traverser) {
    std::map<std::pair<InfostateKey, int>, std::pair<double, double>> range;
    EnumeratingSampler::ForEachPath([&](EnumeratingSampler& s) {
      TrajectoryRecord r = OsTraverse(root, traverser, uniform, 0.5, oracle, s);
      for (const TrajectoryStep& step : r.steps) {
        for (size_t a = 0; a < step.legal.size(); ++a) {
          auto [it, fresh] = range.try_emplace({JointKeyOf(step.state), static_cast<int>(a)},
                                               step.action_values[a], step.action_values[a]);
          it->second.first = std::min(it->second.first, step.action_values[a]);
          it->second.second = std::max(it->second.second, step.action_values[a]);
        }
      }
    });
    for (const auto& [key, mm] : range) CHECK(mm.second - mm.first < 1e-9);
  }
}

TEST_CASE("external sampling") {
  UniformPolicy uniform;
  // Depth one: kuhn player 0 facing a bet after checking.
  const int h0[] = {2};
  const int h1[] = {1};
  GameState facing = Apply(Apply(GameState::FixedDeal(GameId::kKuhn, h0, h1),
                                 ActionType::kCall),
                           ActionType::kRaise);
  Rng rng(1);
  RngSampler sampler(rng);
  EsResult direct = EsTraverse(facing, 0, uniform, sampler);
  REQUIRE(direct.visits.size() == 1);
  CHECK(direct.visits[0].action_values == V{-100.0, 200.0});
  CHECK(direct.visits[0].value == 50.0);
  CHECK(direct.visits[0].Regret(1) == 150.0);

  // Opponent nodes expand a single child.
  int opponent_queries = 0;
  FunctionPolicy counting([&](const InfostateKey& key, std::span<const ActionType> legal) {
    if (key.agent == 1) ++opponent_queries;
    return V(legal.size(), 1.0 / legal.size());
  });
  EsTraverse(GameState::Initial(GameId::kKuhn), 0, counting, sampler);
  CHECK(opponent_queries == 2);

  const GameTree tree = GameTree::Build(GameId::kKuhn);
  for (int traverser = 0; traverser < 2; ++traverser) {
    const auto oracle = testing::ComputeCounterfactualValues(tree, uniform, traverser);
    std::map<InfostateKey, V> sum;
    std::map<InfostateKey, double> mass;
    EnumeratingSampler::ForEachPath([&](EnumeratingSampler& s) {
      EsResult r = EsTraverse(GameState::Initial(GameId::kKuhn), traverser, uniform, s);
      for (const EsVisit& v : r.visits) {
        V& acc = sum[v.key];
        acc.resize(v.legal.size(), 0.0);
        for (size_t a = 0; a < acc.size(); ++a) acc[a] += s.probability() * v.action_values[a];
        mass[v.key] += s.probability();
      }
    });
    CHECK(sum.size() == oracle.action_values.size());
    for (auto& [key, acc] : sum) {
      for (size_t a = 0; a < acc.size(); ++a) {
        CHECK(std::abs(acc[a] / mass[key] - oracle.action_values.at(key)[a]) < 1e-9);
      }
    }
  }
}

TEST_CASE("exact values") {
  UniformPolicy uniform;
  const GameTree tree = GameTree::Build(GameId::kKuhn);
  const double v0 = ExactValue(GameState::Initial(GameId::kKuhn), 0, uniform);
  CHECK(std::abs(v0 - ExpectedValue(tree, uniform)) < 1e-12);
  CHECK(std::abs(v0 + ExactValue(GameState::Initial(GameId::kKuhn), 1, uniform)) < 1e-12);
}

}  // namespace
}  // namespace dreamcfr
