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

#ifndef DREAMCFR_MC_SAMPLING_H_
#define DREAMCFR_MC_SAMPLING_H_

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dreamcfr/game.h"
#include "dreamcfr/infostate.h"
#include "dreamcfr/policy.h"
#include "dreamcfr/random.h"

namespace dreamcfr {

// Traverser: epsilon * uniform + (1 - epsilon) * pi. Others: pi.
std::vector<double> SamplingPolicy(std::span<const double> pi, double epsilon,
                                   bool is_traverser);

// Per-action baseline values b(h, a) from the traverser's point of view.
class BaselineSource {
 public:
  virtual ~BaselineSource() = default;
  virtual void Values(const GameState& state,
                      std::span<const ActionType> legal, int traverser,
                      std::span<double> out) const = 0;
};

class ZeroBaseline : public BaselineSource {
 public:
  void Values(const GameState&, std::span<const ActionType>, int,
              std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
};

// Running averages keyed by (joint infostate, action). Means are stored for
// player 0 and negated for player 1.
class BaselineTable : public BaselineSource {
 public:
  struct Entry {
    double mean = 0.0;
    int64_t count = 0;
  };

  void Update(const InfostateKey& joint_key, int action, double observed,
              int traverser);
  // Unvisited entries read as zero.
  Entry Get(const InfostateKey& joint_key, int action) const;
  size_t size() const { return table_.size(); }

  void Values(const GameState& state, std::span<const ActionType> legal,
              int traverser, std::span<double> out) const override;

 private:
  struct KeyHash {
    size_t operator()(const std::pair<InfostateKey, int>& k) const {
      return InfostateKeyHash{}(k.first) * 31 + k.second;
    }
  };
  std::unordered_map<std::pair<InfostateKey, int>, Entry, KeyHash> table_;
};

struct TrajectoryStep {
  GameState state;
  InfostateKey key;  // actor's infostate
  int actor = 0;
  std::vector<ActionType> legal;
  int action = 0;
  std::vector<double> policy;    // pi at the actor's infostate
  std::vector<double> sampling;  // xi
  double sample_prob = 0.0;      // sampling[action]
  // Traverser's sample reach before and after this step.
  double traverser_reach_before = 1.0;
  double traverser_reach_after = 1.0;
  std::vector<double> baseline;
  std::vector<double> action_values;  // baseline-adjusted estimates
  double value = 0.0;                 // sum_a policy[a] * action_values[a]
  double child_value = 0.0;           // estimate at the successor history
};

struct TrajectoryRecord {
  int traverser = 0;
  std::vector<TrajectoryStep> steps;  // decision points in play order
  GameState terminal;
  double terminal_reward = 0.0;  // for the traverser
  double root_value = 0.0;
  int64_t nodes_touched = 0;
};

// One outcome-sampling trajectory from `root`. Traverser actions follow the
// epsilon-mixed sampling policy, other actions follow `policy`, chance follows
// its distribution. Estimates are corrected with `baseline` at every decision
// point. Throws SamplingError if a sampled action has zero probability.
TrajectoryRecord OsTraverse(const GameState& root, int traverser,
                            const PolicySource& policy, double epsilon,
                            const BaselineSource& baseline, Sampler& sampler);

// Feeds each step's observed successor value into the running averages.
void UpdateBaselines(BaselineTable& table, const TrajectoryRecord& record);

struct EsVisit {
  GameState state;
  InfostateKey key;
  std::vector<ActionType> legal;
  std::vector<double> policy;
  std::vector<double> action_values;
  double value = 0.0;

  double Regret(int a) const { return action_values[a] - value; }
};

struct EsResult {
  std::vector<EsVisit> visits;  // traverser decision points, post-order
  double root_value = 0.0;
  int64_t nodes_touched = 0;
};

// External sampling: every traverser action is expanded, one opponent action
// and one chance outcome are sampled per visit.
EsResult EsTraverse(const GameState& root, int traverser,
                    const PolicySource& policy, Sampler& sampler);

// Exact expected values for the traverser under `policy` at a history and,
// for decision nodes, at each of its actions.
double ExactValue(const GameState& state, int traverser,
                  const PolicySource& policy);
std::vector<double> ExactActionValues(const GameState& state, int traverser,
                                      const PolicySource& policy);

// Baseline returning exact expected successor values: b(h, a) = v(h, a).
class OracleBaseline : public BaselineSource {
 public:
  explicit OracleBaseline(const PolicySource& policy) : policy_(policy) {}
  void Values(const GameState& state, std::span<const ActionType> legal,
              int traverser, std::span<double> out) const override;

 private:
  const PolicySource& policy_;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_MC_SAMPLING_H_
