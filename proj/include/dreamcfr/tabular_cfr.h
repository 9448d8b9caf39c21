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

#ifndef DREAMCFR_TABULAR_CFR_H_
#define DREAMCFR_TABULAR_CFR_H_

#include <array>
#include <span>
#include <unordered_map>
#include <vector>

#include "dreamcfr/game_tree.h"
#include "dreamcfr/infostate.h"
#include "dreamcfr/policy.h"

namespace dreamcfr {

enum class RegretMatchingMode {
  kUniform,  // no positive regret -> uniform
  kArgmax,   // no positive regret -> all mass on the largest entry
};

enum class Weighting { kVanilla, kLinear };
enum class UpdateMode { kSimultaneous, kAlternating };

// Probabilities proportional to the positive parts of `regrets`. Ties in
// argmax mode go to the lowest index. Throws InvalidInputError on NaN or an
// empty vector.
std::vector<double> RegretMatching(std::span<const double> regrets,
                                   RegretMatchingMode mode);
void RegretMatchingInto(std::span<const double> regrets,
                        RegretMatchingMode mode, std::span<double> out);

// Iteration t contributes with weight 1 (vanilla) or t (linear).
double IterationWeight(Weighting weighting, int t);

// Cumulative (unnormalized) regrets; a missing key means all zeros.
class RegretTable {
 public:
  std::vector<double>& Slot(const InfostateKey& key, int num_actions);
  std::vector<double> Get(const InfostateKey& key, int num_actions) const;
  void Accumulate(const InfostateKey& key, std::span<const double> regret,
                  double weight);
  size_t size() const { return table_.size(); }
  const auto& table() const { return table_; }

 private:
  std::unordered_map<InfostateKey, std::vector<double>, InfostateKeyHash>
      table_;
};

// Reach-weighted policy sums for the average policy.
class AvgPolicyAccumulator {
 public:
  struct Entry {
    std::vector<double> policy_sum;
    double weight_sum = 0.0;
  };

  Entry& Slot(const InfostateKey& key, int num_actions);
  // Adds weight * policy to the policy sum and weight to the weight sum.
  void Add(const InfostateKey& key, std::span<const double> policy,
           double weight);
  const Entry* Find(const InfostateKey& key) const;
  size_t size() const { return table_.size(); }
  const auto& table() const { return table_; }

 private:
  std::unordered_map<InfostateKey, Entry, InfostateKeyHash> table_;
};

// Policy sum / weight sum per key; zero-weight keys play uniformly.
TabularPolicy AveragePolicy(const AvgPolicyAccumulator& acc);
TabularPolicy AveragePolicy(const std::array<AvgPolicyAccumulator, 2>& acc);

struct CfrTables {
  std::array<RegretTable, 2> regrets;
  std::array<AvgPolicyAccumulator, 2> averages;
};

// One full-tree CFR iteration at iteration number t >= 1. Updates both
// agents (simultaneous) or only agent t mod 2 (alternating). Returns each
// agent's expected value under the iteration's current policy.
std::array<double, 2> CfrIteration(const GameTree& tree, CfrTables& tables,
                                   int t, Weighting weighting,
                                   UpdateMode updates);

// Regret-matched current policy for every infoset in the tree.
TabularPolicy CurrentPolicy(const GameTree& tree, const CfrTables& tables);

class CfrSolver {
 public:
  CfrSolver(GameTree tree, Weighting weighting, UpdateMode updates)
      : tree_(std::move(tree)), weighting_(weighting), updates_(updates) {}

  std::array<double, 2> RunIteration() {
    return CfrIteration(tree_, tables_, ++iteration_, weighting_, updates_);
  }
  void RunIterations(int n) {
    for (int k = 0; k < n; ++k) RunIteration();
  }

  int iteration() const { return iteration_; }
  const GameTree& tree() const { return tree_; }
  const CfrTables& tables() const { return tables_; }
  TabularPolicy AveragePolicy() const {
    return dreamcfr::AveragePolicy(tables_.averages);
  }
  TabularPolicy CurrentPolicy() const {
    return dreamcfr::CurrentPolicy(tree_, tables_);
  }

 private:
  GameTree tree_;
  Weighting weighting_;
  UpdateMode updates_;
  CfrTables tables_;
  int iteration_ = 0;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_TABULAR_CFR_H_
