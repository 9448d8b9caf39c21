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

#include "dreamcfr/tabular_cfr.h"

#include <cmath>

#include "dreamcfr/errors.h"

namespace dreamcfr {

void RegretMatchingInto(std::span<const double> regrets,
                        RegretMatchingMode mode, std::span<double> out) {
  if (regrets.empty()) throw InvalidInputError("regret matching on no actions");
  double positive = 0.0;
  for (double r : regrets) {
    if (std::isnan(r)) throw InvalidInputError("NaN regret");
    if (r > 0.0) positive += r;
  }
  const size_t n = regrets.size();
  if (positive > 0.0 && std::isfinite(positive)) {
    for (size_t a = 0; a < n; ++a) {
      out[a] = regrets[a] > 0.0 ? regrets[a] / positive : 0.0;
    }
    return;
  }
  if (positive > 0.0) {
    // Infinite positive mass: split evenly among the infinite entries.
    int count = 0;
    for (double r : regrets) count += std::isinf(r) && r > 0;
    for (size_t a = 0; a < n; ++a) {
      out[a] = std::isinf(regrets[a]) && regrets[a] > 0 ? 1.0 / count : 0.0;
    }
    return;
  }
  if (mode == RegretMatchingMode::kUniform) {
    for (size_t a = 0; a < n; ++a) out[a] = 1.0 / n;
    return;
  }
  size_t best = 0;
  for (size_t a = 1; a < n; ++a) {
    if (regrets[a] > regrets[best]) best = a;
  }
  for (size_t a = 0; a < n; ++a) out[a] = a == best ? 1.0 : 0.0;
}

std::vector<double> RegretMatching(std::span<const double> regrets,
                                   RegretMatchingMode mode) {
  std::vector<double> out(regrets.size());
  RegretMatchingInto(regrets, mode, out);
  return out;
}

double IterationWeight(Weighting weighting, int t) {
  return weighting == Weighting::kLinear ? static_cast<double>(t) : 1.0;
}

std::vector<double>& RegretTable::Slot(const InfostateKey& key,
                                       int num_actions) {
  auto& slot = table_[key];
  if (slot.empty()) slot.assign(num_actions, 0.0);
  return slot;
}

std::vector<double> RegretTable::Get(const InfostateKey& key,
                                     int num_actions) const {
  auto it = table_.find(key);
  if (it == table_.end()) return std::vector<double>(num_actions, 0.0);
  return it->second;
}

void RegretTable::Accumulate(const InfostateKey& key,
                             std::span<const double> regret, double weight) {
  auto& slot = Slot(key, static_cast<int>(regret.size()));
  for (size_t a = 0; a < regret.size(); ++a) slot[a] += weight * regret[a];
}

AvgPolicyAccumulator::Entry& AvgPolicyAccumulator::Slot(
    const InfostateKey& key, int num_actions) {
  Entry& e = table_[key];
  if (e.policy_sum.empty()) e.policy_sum.assign(num_actions, 0.0);
  return e;
}

void AvgPolicyAccumulator::Add(const InfostateKey& key,
                               std::span<const double> policy, double weight) {
  Entry& e = Slot(key, static_cast<int>(policy.size()));
  for (size_t a = 0; a < policy.size(); ++a) {
    e.policy_sum[a] += weight * policy[a];
  }
  e.weight_sum += weight;
}

const AvgPolicyAccumulator::Entry* AvgPolicyAccumulator::Find(
    const InfostateKey& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

TabularPolicy AveragePolicy(const AvgPolicyAccumulator& acc) {
  TabularPolicy policy;
  for (const auto& [key, e] : acc.table()) {
    const size_t n = e.policy_sum.size();
    std::vector<double> probs(n, 1.0 / n);
    if (e.weight_sum > 0.0) {
      for (size_t a = 0; a < n; ++a) probs[a] = e.policy_sum[a] / e.weight_sum;
    }
    policy.Set(key, std::move(probs));
  }
  return policy;
}

TabularPolicy AveragePolicy(const std::array<AvgPolicyAccumulator, 2>& acc) {
  TabularPolicy policy = AveragePolicy(acc[0]);
  const TabularPolicy second = AveragePolicy(acc[1]);
  for (const auto& [key, probs] : second.table()) {
    policy.Set(key, probs);
  }
  return policy;
}

namespace {

struct CfrPass {
  const GameTree& tree;
  std::span<const int> offset;
  std::span<const double> sigma;
  std::array<bool, 2> updating;
  std::vector<double> regret;      // instantaneous, per infoset action
  std::vector<double> policy_sum;  // reach * sigma
  std::vector<double> reach_sum;   // per infoset

  double Walk(int index, double reach0, double reach1, double chance) {
    const TreeNode& node = tree.node(index);
    switch (node.kind) {
      case NodeKind::kTerminal:
        return node.payoff0;
      case NodeKind::kChance: {
        double v = 0.0;
        for (int k = 0; k < node.num_children; ++k) {
          const int child = node.first_child + k;
          const double p = tree.node(child).chance_prob;
          v += p * Walk(child, reach0, reach1, chance * p);
        }
        return v;
      }
      case NodeKind::kDecision:
        break;
    }
    const int player = node.player;
    const int info = node.infoset;
    const int base = offset[info];
    const int n = node.num_children;
    std::array<double, 8> child_value{};
    double v = 0.0;
    for (int a = 0; a < n; ++a) {
      const double s = sigma[base + a];
      child_value[a] =
          player == 0 ? Walk(node.first_child + a, reach0 * s, reach1, chance)
                      : Walk(node.first_child + a, reach0, reach1 * s, chance);
      v += s * child_value[a];
    }
    if (updating[player]) {
      const double own = player == 0 ? reach0 : reach1;
      const double external = (player == 0 ? reach1 : reach0) * chance;
      const double sign = player == 0 ? 1.0 : -1.0;
      for (int a = 0; a < n; ++a) {
        regret[base + a] += external * sign * (child_value[a] - v);
        policy_sum[base + a] += own * sigma[base + a];
      }
      reach_sum[info] += own;
    }
    return v;
  }
};

}  // namespace

std::array<double, 2> CfrIteration(const GameTree& tree, CfrTables& tables,
                                   int t, Weighting weighting,
                                   UpdateMode updates) {
  if (t < 1) throw InvalidInputError("CFR iterations start at t = 1");
  const auto& infosets = tree.infosets();
  const int n = static_cast<int>(infosets.size());
  std::vector<int> offset(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    offset[i + 1] = offset[i] + static_cast<int>(infosets[i].legal.size());
  }
  std::vector<double> sigma(offset[n]);
  std::vector<std::vector<double>*> regret_slot(n);
  std::vector<AvgPolicyAccumulator::Entry*> avg_slot(n);
  for (int i = 0; i < n; ++i) {
    const TreeInfoset& info = infosets[i];
    const int na = static_cast<int>(info.legal.size());
    regret_slot[i] = &tables.regrets[info.player].Slot(info.key, na);
    avg_slot[i] = &tables.averages[info.player].Slot(info.key, na);
    RegretMatchingInto(*regret_slot[i], RegretMatchingMode::kUniform,
                       std::span<double>(sigma).subspan(offset[i], na));
  }

  CfrPass pass{tree, offset, sigma, {true, true}, {}, {}, {}};
  if (updates == UpdateMode::kAlternating) {
    pass.updating = {t % 2 == 0, t % 2 == 1};
  }
  pass.regret.assign(offset[n], 0.0);
  pass.policy_sum.assign(offset[n], 0.0);
  pass.reach_sum.assign(n, 0.0);
  const double value0 = pass.Walk(tree.root(), 1.0, 1.0, 1.0);

  const double w = IterationWeight(weighting, t);
  for (int i = 0; i < n; ++i) {
    if (!pass.updating[infosets[i].player]) continue;
    auto& regret = *regret_slot[i];
    auto& avg = *avg_slot[i];
    for (size_t a = 0; a < regret.size(); ++a) {
      regret[a] += w * pass.regret[offset[i] + a];
      avg.policy_sum[a] += w * pass.policy_sum[offset[i] + a];
    }
    avg.weight_sum += w * pass.reach_sum[i];
  }
  return {value0, -value0};
}

TabularPolicy CurrentPolicy(const GameTree& tree, const CfrTables& tables) {
  TabularPolicy policy;
  for (const TreeInfoset& info : tree.infosets()) {
    const int na = static_cast<int>(info.legal.size());
    policy.Set(info.key, RegretMatching(tables.regrets[info.player].Get(
                                            info.key, na),
                                        RegretMatchingMode::kUniform));
  }
  return policy;
}

}  // namespace dreamcfr
