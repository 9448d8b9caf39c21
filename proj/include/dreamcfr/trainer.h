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

#ifndef DREAMCFR_TRAINER_H_
#define DREAMCFR_TRAINER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dreamcfr/buffers.h"
#include "dreamcfr/game.h"
#include "dreamcfr/game_tree.h"
#include "dreamcfr/mc_sampling.h"
#include "dreamcfr/mlp.h"
#include "dreamcfr/policy.h"
#include "dreamcfr/random.h"
#include "dreamcfr/tabular_cfr.h"

namespace dreamcfr {

enum class Algorithm { kDream, kOsSdCfr, kEsSdCfr };
enum class ResetMode { kAlways, kNever, kEvery10 };

const char* AlgorithmName(Algorithm a);
Algorithm ParseAlgorithm(std::string_view name);
const char* ResetModeName(ResetMode m);
ResetMode ParseResetMode(std::string_view name);

struct TrainerConfig {
  GameId game = GameId::kLeduc;
  Algorithm algorithm = Algorithm::kDream;
  double epsilon = 0.5;
  int traversals = 900;
  Weighting weighting = Weighting::kLinear;
  ResetMode reset = ResetMode::kAlways;
  int iterations = 100;
  uint64_t seed = 0;

  int adv_batches_scratch = 3000;
  int adv_batches_finetune = 500;
  int adv_batch_size = 2048;
  int q_batches = 1000;
  int q_batch_size = 512;
  double lr = 1e-3;
  double clip = 1.0;
  int64_t adv_capacity = 2'000'000;
  int64_t q_capacity = 200'000;

  bool avg_net = false;
  int64_t avg_capacity = 2'000'000;
  int avg_batches = 4000;
  int avg_batch_size = 2048;

  // Expected-SARSA targets use the policy stored at collection time instead
  // of recomputing it from the current advantage network.
  bool q_stored_policy = false;

  int hidden_width = kDefaultHiddenWidth;
  int hidden_layers = kDefaultHiddenLayers;
  // Chips per network output unit.
  double value_scale = 100.0;

  // Throws ConfigValidationError naming the offending key.
  void Validate() const;
  bool operator==(const TrainerConfig&) const = default;
};

std::string TrainerConfigToJson(const TrainerConfig& config);
TrainerConfig TrainerConfigFromJson(const std::string& text);

struct IterationReport {
  int iteration = 0;
  int traverser = 0;
  int64_t nodes_touched = 0;
  int64_t total_nodes_touched = 0;
  int64_t adv_buffer_size = 0;
  int64_t q_buffer_size = 0;
  double q_loss = 0.0;
  double d_loss = 0.0;
  bool d_reset = false;
  double wall_time_s = 0.0;
};

// Regret matching in argmax mode over network outputs; NaN aborts training.
std::vector<double> PolicyFromAdvantages(std::span<const double> advantages);

// Output slot of an action in the three-wide network heads.
inline int ActionSlot(ActionType a) { return static_cast<int>(a); }

// Policy from per-agent advantage networks; agents without a network play
// uniformly.
class AdvantagePolicy : public PolicySource {
 public:
  explicit AdvantagePolicy(std::array<const MlpParams*, 2> nets)
      : nets_(nets) {}
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override;

 private:
  std::array<const MlpParams*, 2> nets_;
};

// Learned baseline: Q(s*(h), a) scaled back to chips.
class QNetBaseline : public BaselineSource {
 public:
  QNetBaseline(const MlpParams& net, double value_scale)
      : net_(net), scale_(value_scale) {}
  void Values(const GameState& state, std::span<const ActionType> legal,
              int traverser, std::span<double> out) const override;

 private:
  const MlpParams& net_;
  double scale_;
};

struct CollectSinks {
  ReservoirBuffer<AdvantageSample>* advantages = nullptr;
  CircularBuffer<QTransition>* transitions = nullptr;
  std::array<ReservoirBuffer<PolicySample>*, 2> policies{nullptr, nullptr};
};

struct CollectResult {
  int64_t nodes_touched = 0;
  int64_t advantage_samples = 0;
  int64_t transitions = 0;
};

// Converts one outcome-sampling trajectory into training records: advantage
// samples at traverser decision points (weight: product of 1 / xi over the
// traverser's earlier sampled actions), one transition per consecutive pair
// of decision points (either agent) plus the final decision-to-terminal
// segment,
// and average-policy samples at the other agent's decision points.
void RecordTrajectory(const TrajectoryRecord& record, int t,
                      double value_scale, const CollectSinks& sinks, Rng& rng,
                      CollectResult& result);

// Runs `traversals` outcome-sampling trajectories for `traverser`.
CollectResult DreamCollect(GameId game, int t, int traverser,
                           const PolicySource& policy,
                           const BaselineSource& baseline, double epsilon,
                           int traversals, double value_scale,
                           const CollectSinks& sinks, Rng& rng);

// External-sampling collection: regrets at every visited traverser infostate,
// unit weight.
CollectResult EsCollect(GameId game, int t, int traverser,
                        const PolicySource& policy, int traversals,
                        double value_scale,
                        ReservoirBuffer<AdvantageSample>& sink, Rng& rng);

// Expected-SARSA target in network units: reward at terminal transitions,
// else reward + sum_a next_policy[a] * next_q[a] over legal slots.
double QTarget(const QTransition& tr, std::span<const float> next_policy,
               std::span<const float> next_q);

// Next-state policies for every transition, recomputed from the advantage
// networks (or copied from the stored policy).
std::vector<std::array<float, kNetOutputs>> NextPolicies(
    const CircularBuffer<QTransition>& buffer,
    const std::function<std::array<float, kNetOutputs>(const QTransition&)>&
        policy_of);

TrainResult TrainQNet(MlpParams& net, AdamState& adam,
                      const CircularBuffer<QTransition>& buffer,
                      const std::vector<std::array<float, kNetOutputs>>& next_pi,
                      const TrainOptions& options, Rng& rng);

// Advantage or average-policy training on a reservoir; in linear mode each
// sample's loss weight is multiplied by its iteration.
TrainResult TrainSampleNet(MlpParams& net, AdamState& adam,
                           const ReservoirBuffer<AdvantageSample>& buffer,
                           Weighting weighting, const TrainOptions& options,
                           Rng& rng);

// Explicit average policy of the archived networks at one infostate:
// sum_t w_t x_t(s) pi_t(s) / sum_t w_t x_t(s), uniform when the denominator
// vanishes.
std::vector<double> AveragePolicyAt(const ModelArchive& archive, int agent,
                                    const InfostateKey& key,
                                    ArchiveWeighting weighting);

// The same average computed for every infoset of a tree with batched
// forward passes.
TabularPolicy ArchiveAveragePolicy(const GameTree& tree,
                                   const ModelArchive& archive,
                                   ArchiveWeighting weighting);

// Lazy per-infostate AveragePolicyAt, for games without a tree.
class ArchivePolicy : public PolicySource {
 public:
  ArchivePolicy(const ModelArchive& archive, ArchiveWeighting weighting)
      : archive_(archive), weighting_(weighting) {}
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override;

 private:
  const ModelArchive& archive_;
  ArchiveWeighting weighting_;
  mutable std::unordered_map<InfostateKey, std::vector<double>,
                             InfostateKeyHash>
      cache_;
};

// Softmax average-policy networks.
class AverageNetPolicy : public PolicySource {
 public:
  explicit AverageNetPolicy(std::array<const MlpParams*, 2> nets)
      : nets_(nets) {}
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override;

 private:
  std::array<const MlpParams*, 2> nets_;
};

class Trainer {
 public:
  explicit Trainer(TrainerConfig config);

  // Runs iteration last_iteration() + 1.
  IterationReport RunIteration();

  int last_iteration() const { return t_; }
  const TrainerConfig& config() const { return config_; }
  const ModelArchive& archive() const { return archive_; }
  const MlpParams& advantage_net(int agent) const { return adv_[agent]; }
  bool has_advantage_net(int agent) const { return adv_ready_[agent]; }
  const MlpParams& q_net(int agent) const { return q_[agent]; }
  MlpParams& mutable_q_net(int agent) { return q_[agent]; }
  const ReservoirBuffer<AdvantageSample>& advantage_buffer(int agent) const {
    return adv_buffer_[agent];
  }
  const CircularBuffer<QTransition>& q_buffer(int agent) const {
    return q_buffer_[agent];
  }
  const ReservoirBuffer<PolicySample>& policy_buffer(int agent) const {
    return avg_buffer_[agent];
  }
  int64_t total_nodes_touched() const { return nodes_total_; }

  // Current policy of both agents (regret-matched advantage networks).
  AdvantagePolicy CurrentPolicy() const;
  ArchiveWeighting archive_weighting() const {
    return config_.weighting == Weighting::kLinear ? ArchiveWeighting::kLinear
                                                   : ArchiveWeighting::kUniform;
  }

  // Trains the optional average-policy network of `agent`.
  TrainResult TrainAverageNet(int agent);
  const MlpParams& average_net(int agent) const { return avg_[agent]; }

  // Writes config.json, state.bin and the archive under `dir`.
  void SaveCheckpoint(const std::string& dir) const;
  static Trainer LoadCheckpoint(const std::string& dir);

  bool operator==(const Trainer& other) const;

 private:
  uint64_t StreamSeed(int t, int purpose) const;
  bool ResetsAt(int t) const;

  TrainerConfig config_;
  int t_ = 0;
  int64_t nodes_total_ = 0;
  std::array<MlpParams, 2> adv_;
  std::array<AdamState, 2> adv_adam_;
  std::array<bool, 2> adv_ready_{false, false};
  std::array<MlpParams, 2> q_;
  std::array<AdamState, 2> q_adam_;
  std::array<MlpParams, 2> avg_;
  std::array<AdamState, 2> avg_adam_;
  std::array<ReservoirBuffer<AdvantageSample>, 2> adv_buffer_;
  std::array<CircularBuffer<QTransition>, 2> q_buffer_;
  std::array<ReservoirBuffer<PolicySample>, 2> avg_buffer_;
  ModelArchive archive_;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_TRAINER_H_
