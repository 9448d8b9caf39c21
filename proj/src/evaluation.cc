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

#include "dreamcfr/evaluation.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dreamcfr/errors.h"
#include "dreamcfr/random.h"

namespace dreamcfr {
namespace {

std::vector<double> CheckedProbabilities(const PolicySource& policy,
                                         const InfostateKey& key,
                                         std::span<const ActionType> legal) {
  std::vector<double> probs = policy.ActionProbabilities(key, legal);
  if (probs.size() != legal.size()) {
    throw InvalidInputError("policy returned the wrong number of actions at " +
                            key.ToString());
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) {
      throw InvalidInputError("invalid probability at " + key.ToString());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidInputError("probabilities do not sum to one at " +
                            key.ToString());
  }
  return probs;
}

}  // namespace

std::vector<std::vector<double>> TabulateOnTree(const GameTree& tree,
                                                const PolicySource& policy,
                                                int player) {
  const auto& infosets = tree.infosets();
  std::vector<std::vector<double>> out(infosets.size());
  for (size_t i = 0; i < infosets.size(); ++i) {
    if (player >= 0 && infosets[i].player != player) continue;
    out[i] = CheckedProbabilities(policy, infosets[i].key, infosets[i].legal);
  }
  return out;
}

double ExpectedValue(const GameTree& tree, const PolicySource& policy) {
  const auto sigma = TabulateOnTree(tree, policy);
  const auto& nodes = tree.nodes();
  // Children always have larger indices than their parent.
  std::vector<double> value(nodes.size(), 0.0);
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const TreeNode& n = nodes[i];
    if (n.kind == NodeKind::kTerminal) {
      value[i] = n.payoff0;
      continue;
    }
    double v = 0.0;
    for (int k = 0; k < n.num_children; ++k) {
      const int c = n.first_child + k;
      const double p = n.kind == NodeKind::kChance ? nodes[c].chance_prob
                                                   : sigma[n.infoset][k];
      v += p * value[c];
    }
    value[i] = v;
  }
  return value[tree.root()];
}

BestResponseResult BestResponse(const GameTree& tree,
                                const PolicySource& policy, int exploiter) {
  if (exploiter != 0 && exploiter != 1) {
    throw InvalidInputError("exploiter must be 0 or 1");
  }
  const int opponent = 1 - exploiter;
  const auto sigma = TabulateOnTree(tree, policy, opponent);
  const auto& nodes = tree.nodes();
  const auto& infosets = tree.infosets();
  const double sign = exploiter == 0 ? 1.0 : -1.0;

  // Opponent-and-chance reach of every node.
  std::vector<double> reach(nodes.size(), 0.0);
  reach[tree.root()] = 1.0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    for (int k = 0; k < n.num_children; ++k) {
      const int c = n.first_child + k;
      double p = 1.0;
      if (n.kind == NodeKind::kChance) {
        p = nodes[c].chance_prob;
      } else if (n.player == opponent) {
        p = sigma[n.infoset][k];
      }
      reach[c] = reach[i] * p;
    }
  }

  std::vector<double> value(nodes.size(), 0.0);
  std::vector<char> value_done(nodes.size(), 0);
  std::vector<int> choice(infosets.size(), -1);
  std::function<int(int)> choose;
  std::function<double(int)> node_value = [&](int i) -> double {
    if (value_done[i]) return value[i];
    const TreeNode& n = nodes[i];
    double v = 0.0;
    if (n.kind == NodeKind::kTerminal) {
      v = sign * n.payoff0;
    } else if (n.kind == NodeKind::kChance || n.player == opponent) {
      for (int k = 0; k < n.num_children; ++k) {
        const int c = n.first_child + k;
        const double p = n.kind == NodeKind::kChance ? nodes[c].chance_prob
                                                     : sigma[n.infoset][k];
        if (p > 0.0) v += p * node_value(c);
      }
    } else {
      v = node_value(n.first_child + choose(n.infoset));
    }
    value_done[i] = 1;
    value[i] = v;
    return v;
  };
  choose = [&](int info) -> int {
    if (choice[info] >= 0) return choice[info];
    const TreeInfoset& is = infosets[info];
    std::vector<double> q(is.legal.size(), 0.0);
    for (int h : is.nodes) {
      if (reach[h] == 0.0) continue;
      for (size_t a = 0; a < q.size(); ++a) {
        q[a] += reach[h] * node_value(nodes[h].first_child + a);
      }
    }
    int best = 0;
    for (size_t a = 1; a < q.size(); ++a) {
      if (q[a] > q[best]) best = static_cast<int>(a);
    }
    choice[info] = best;
    return best;
  };

  BestResponseResult result;
  result.value = node_value(tree.root());
  for (size_t i = 0; i < infosets.size(); ++i) {
    if (infosets[i].player != exploiter) continue;
    std::vector<double> probs(infosets[i].legal.size(), 0.0);
    probs[choose(static_cast<int>(i))] = 1.0;
    result.policy.Set(infosets[i].key, std::move(probs));
  }
  return result;
}

BestResponseResult BestResponse(GameId game, const PolicySource& policy,
                                int exploiter) {
  return BestResponse(GameTree::Build(game), policy, exploiter);
}

ExploitabilityResult Exploitability(const GameTree& tree,
                                    const PolicySource& policy,
                                    int big_blind) {
  ExploitabilityResult r;
  r.big_blind = big_blind;
  for (int p = 0; p < 2; ++p) {
    r.br_value[p] = BestResponse(tree, policy, p).value;
  }
  r.total_chips = r.br_value[0] + r.br_value[1];
  r.mbb = ToMbb(r.total_chips, big_blind);
  r.per_player_mbb = r.mbb / 2.0;
  return r;
}

ExploitabilityResult Exploitability(GameId game, const PolicySource& policy,
                                    int big_blind) {
  return Exploitability(GameTree::Build(game), policy, big_blind);
}

namespace {

class StreamSampler : public Sampler {
 public:
  explicit StreamSampler(uint64_t seed) : rng_(seed) {}
  int SampleIndex(std::span<const double> probs) override {
    return rng_.SampleIndex(probs);
  }
  int64_t SampleUniform(int64_t n) override { return rng_.UniformInt(n); }

 private:
  Rng rng_;
};

// Payoff to player 0 of one hand.
double PlayHand(GameId game, const PolicySource& p0, const PolicySource& p1,
                uint64_t deal_seed, uint64_t action_seed) {
  StreamSampler chance(deal_seed);
  Rng actions(action_seed);
  GameState s = GameState::Initial(game);
  while (true) {
    const NodeInfo info = NodeKindOf(s);
    if (info.kind == NodeKind::kTerminal) return TerminalReward(s, 0);
    if (info.kind == NodeKind::kChance) {
      s = SampleChance(s, chance);
      continue;
    }
    const std::vector<ActionType> legal = LegalActions(s);
    const PolicySource& pol = info.agent == 0 ? p0 : p1;
    const std::vector<double> probs =
        CheckedProbabilities(pol, InfostateKeyOf(s, info.agent), legal);
    s = Apply(s, legal[actions.SampleIndex(probs)]);
  }
}

}  // namespace

MatchResult HeadToHead(GameId game, const PolicySource& a,
                       const PolicySource& b, int64_t hands, uint64_t seed,
                       bool duplicate) {
  if (hands < 1) throw InvalidInputError("need at least one hand");
  // Statistics over independent units: hand pairs under duplicate dealing,
  // single hands otherwise.
  double sum = 0.0, sum_sq = 0.0;
  int64_t units = 0;
  double unit = 0.0;
  int unit_hands = 0;
  for (int64_t h = 0; h < hands; ++h) {
    const uint64_t stream = duplicate ? static_cast<uint64_t>(h / 2)
                                      : static_cast<uint64_t>(h);
    const uint64_t deal_seed = MixSeed(seed, 2 * stream);
    const uint64_t action_seed = MixSeed(seed, 2 * stream + 1);
    const bool a_first = h % 2 == 0;
    const double r0 = a_first ? PlayHand(game, a, b, deal_seed, action_seed)
                              : PlayHand(game, b, a, deal_seed, action_seed);
    unit += a_first ? r0 : -r0;
    ++unit_hands;
    if (!duplicate || unit_hands == 2 || h + 1 == hands) {
      const double mean = unit / unit_hands;
      sum += mean;
      sum_sq += mean * mean;
      ++units;
      unit = 0.0;
      unit_hands = 0;
    }
  }
  MatchResult r;
  r.hands = hands;
  r.mean = sum / units;
  if (units > 1) {
    const double var = std::max(0.0, (sum_sq - units * r.mean * r.mean) /
                                         (units - 1));
    r.ci95 = 1.96 * std::sqrt(var / units);
  }
  return r;
}

std::vector<ProbeOpponent> ProbeOpponents() {
  std::vector<ProbeOpponent> out;
  out.push_back({"always-call", std::make_unique<PreferencePolicy>(
                                    std::vector{ActionType::kCall})});
  out.push_back({"always-raise",
                 std::make_unique<PreferencePolicy>(
                     std::vector{ActionType::kRaise, ActionType::kCall})});
  out.push_back({"fold-to-raise",
                 std::make_unique<PreferencePolicy>(
                     std::vector{ActionType::kFold, ActionType::kCall})});
  out.push_back({"uniform", std::make_unique<UniformPolicy>()});
  return out;
}

ProbeEvaluation EvaluateAgainstProbes(GameId game, const PolicySource& agent,
                                      int64_t hands, uint64_t seed,
                                      int big_blind) {
  ProbeEvaluation eval;
  double best = 0.0;
  uint64_t salt = 0;
  for (const ProbeOpponent& probe : ProbeOpponents()) {
    const MatchResult m =
        HeadToHead(game, agent, *probe.policy, hands, MixSeed(seed, salt++));
    best = std::max(best, -m.mean);
    eval.matches.emplace_back(probe.name, m);
  }
  eval.lower_bound_chips = 2.0 * best;
  eval.lower_bound_mbb = ToMbb(eval.lower_bound_chips, big_blind);
  return eval;
}

}  // namespace dreamcfr
