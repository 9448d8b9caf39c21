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

#include "dreamcfr/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "dreamcfr/binary_io.h"
#include "dreamcfr/errors.h"
#include "json.hpp"

namespace dreamcfr {
namespace {

namespace fs = std::filesystem;
using Matrix = MlpParams::Matrix;

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

const char* WeightingName(Weighting w) {
  return w == Weighting::kLinear ? "linear" : "vanilla";
}

Weighting ParseWeighting(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "linear") return Weighting::kLinear;
  if (s == "vanilla") return Weighting::kVanilla;
  throw InvalidInputError("unknown weighting: " + std::string(name));
}

std::array<float, kNetOutputs> SlotMask(std::span<const ActionType> legal) {
  std::array<float, kNetOutputs> mask{};
  for (ActionType a : legal) mask[ActionSlot(a)] = 1.0f;
  return mask;
}

std::array<float, kNetOutputs> Slotted(std::span<const ActionType> legal,
                                       std::span<const double> values,
                                       double scale = 1.0) {
  std::array<float, kNetOutputs> out{};
  for (size_t k = 0; k < legal.size(); ++k) {
    out[ActionSlot(legal[k])] = static_cast<float>(values[k] / scale);
  }
  return out;
}

// Regret-matched policy of `net` at one encoded infostate.
std::vector<double> NetPolicyAt(const MlpParams& net,
                                std::span<const float> features,
                                std::span<const ActionType> legal) {
  const std::vector<float> out = Forward(net, features);
  std::vector<double> adv(legal.size());
  for (size_t k = 0; k < legal.size(); ++k) adv[k] = out[ActionSlot(legal[k])];
  return PolicyFromAdvantages(adv);
}

std::vector<double> UniformOver(size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double EntryWeight(ArchiveWeighting weighting, int iteration) {
  return weighting == ArchiveWeighting::kLinear ? iteration : 1.0;
}

void WriteParams(BinaryWriter& w, const MlpParams& p) {
  w.U64(p.dims.size());
  for (int d : p.dims) w.U32(static_cast<uint32_t>(d));
  for (int l = 0; l < p.num_layers(); ++l) {
    const Matrix& m = p.weights[l];
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) w.F32(m(r, c));
    }
    for (int r = 0; r < p.biases[l].size(); ++r) w.F32(p.biases[l](r));
  }
}

MlpParams ReadParams(BinaryReader& r) {
  MlpParams p;
  p.dims.resize(r.Size());
  for (int& d : p.dims) d = static_cast<int>(r.U32());
  for (size_t l = 0; l + 1 < p.dims.size(); ++l) {
    Matrix m(p.dims[l + 1], p.dims[l]);
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) m(i, j) = r.F32();
    }
    MlpParams::Vector b(p.dims[l + 1]);
    for (int i = 0; i < b.size(); ++i) b(i) = r.F32();
    p.weights.push_back(std::move(m));
    p.biases.push_back(std::move(b));
  }
  return p;
}

void WriteAdam(BinaryWriter& w, const AdamState& a) {
  WriteParams(w, a.m);
  WriteParams(w, a.v);
  w.I64(a.step);
  w.F64(a.beta1);
  w.F64(a.beta2);
  w.F64(a.epsilon);
}

AdamState ReadAdam(BinaryReader& r) {
  AdamState a;
  a.m = ReadParams(r);
  a.v = ReadParams(r);
  a.step = r.I64();
  a.beta1 = r.F64();
  a.beta2 = r.F64();
  a.epsilon = r.F64();
  return a;
}

void WriteReservoir(BinaryWriter& w, const ReservoirBuffer<AdvantageSample>& b) {
  w.I64(b.seen());
  w.U64(b.items().size());
  for (const auto& s : b.items()) WriteSample(w, s);
}

void ReadReservoir(BinaryReader& r, ReservoirBuffer<AdvantageSample>& b) {
  const int64_t seen = r.I64();
  std::vector<AdvantageSample> items(r.Size());
  for (auto& s : items) s = ReadSample(r);
  b.Restore(std::move(items), seen);
}

constexpr char kCheckpointMagic[] = "DRMCKPT1";

}  // namespace

const char* AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kDream:
      return "DREAM";
    case Algorithm::kOsSdCfr:
      return "OS-SD-CFR";
    case Algorithm::kEsSdCfr:
      return "ES-SD-CFR";
  }
  return "?";
}

Algorithm ParseAlgorithm(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "dream") return Algorithm::kDream;
  if (s == "os-sd-cfr" || s == "os-sdcfr") return Algorithm::kOsSdCfr;
  if (s == "es-sd-cfr" || s == "es-sdcfr") return Algorithm::kEsSdCfr;
  throw InvalidInputError("unknown algorithm: " + std::string(name));
}

const char* ResetModeName(ResetMode m) {
  switch (m) {
    case ResetMode::kAlways:
      return "Always";
    case ResetMode::kNever:
      return "Never";
    case ResetMode::kEvery10:
      return "Every10";
  }
  return "?";
}

ResetMode ParseResetMode(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "always") return ResetMode::kAlways;
  if (s == "never") return ResetMode::kNever;
  if (s == "every10") return ResetMode::kEvery10;
  throw InvalidInputError("unknown reset mode: " + std::string(name));
}

void TrainerConfig::Validate() const {
  auto positive = [](const char* key, int64_t v) {
    if (v <= 0) throw ConfigValidationError(key, "must be positive");
  };
  if (algorithm != Algorithm::kEsSdCfr &&
      !(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ConfigValidationError("epsilon", "must lie in (0, 1]");
  }
  positive("traversals", traversals);
  positive("iterations", iterations);
  positive("adv_batches_scratch", adv_batches_scratch);
  positive("adv_batches_finetune", adv_batches_finetune);
  positive("adv_batch_size", adv_batch_size);
  positive("q_batches", q_batches);
  positive("q_batch_size", q_batch_size);
  positive("adv_capacity", adv_capacity);
  positive("q_capacity", q_capacity);
  positive("avg_capacity", avg_capacity);
  positive("avg_batches", avg_batches);
  positive("avg_batch_size", avg_batch_size);
  positive("hidden_width", hidden_width);
  positive("hidden_layers", hidden_layers);
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw ConfigValidationError("lr", "must be positive");
  }
  if (!(clip > 0.0) || !std::isfinite(clip)) {
    throw ConfigValidationError("clip", "must be positive");
  }
  if (!(value_scale > 0.0) || !std::isfinite(value_scale)) {
    throw ConfigValidationError("value_scale", "must be positive");
  }
}

std::string TrainerConfigToJson(const TrainerConfig& c) {
  nlohmann::ordered_json j;
  j["game"] = GameName(c.game);
  j["algorithm"] = AlgorithmName(c.algorithm);
  j["epsilon"] = c.epsilon;
  j["traversals"] = c.traversals;
  j["weighting"] = WeightingName(c.weighting);
  j["reset"] = ResetModeName(c.reset);
  j["iterations"] = c.iterations;
  j["seed"] = c.seed;
  j["adv_batches_scratch"] = c.adv_batches_scratch;
  j["adv_batches_finetune"] = c.adv_batches_finetune;
  j["adv_batch_size"] = c.adv_batch_size;
  j["q_batches"] = c.q_batches;
  j["q_batch_size"] = c.q_batch_size;
  j["lr"] = c.lr;
  j["clip"] = c.clip;
  j["adv_capacity"] = c.adv_capacity;
  j["q_capacity"] = c.q_capacity;
  j["avg_net"] = c.avg_net;
  j["avg_capacity"] = c.avg_capacity;
  j["avg_batches"] = c.avg_batches;
  j["avg_batch_size"] = c.avg_batch_size;
  j["q_stored_policy"] = c.q_stored_policy;
  j["hidden_width"] = c.hidden_width;
  j["hidden_layers"] = c.hidden_layers;
  j["value_scale"] = c.value_scale;
  return j.dump(2);
}

TrainerConfig TrainerConfigFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TrainerConfig c;
  c.game = ParseGameId(j.at("game").get<std::string>());
  c.algorithm = ParseAlgorithm(j.at("algorithm").get<std::string>());
  c.epsilon = j.at("epsilon");
  c.traversals = j.at("traversals");
  c.weighting = ParseWeighting(j.at("weighting").get<std::string>());
  c.reset = ParseResetMode(j.at("reset").get<std::string>());
  c.iterations = j.at("iterations");
  c.seed = j.at("seed");
  c.adv_batches_scratch = j.at("adv_batches_scratch");
  c.adv_batches_finetune = j.at("adv_batches_finetune");
  c.adv_batch_size = j.at("adv_batch_size");
  c.q_batches = j.at("q_batches");
  c.q_batch_size = j.at("q_batch_size");
  c.lr = j.at("lr");
  c.clip = j.at("clip");
  c.adv_capacity = j.at("adv_capacity");
  c.q_capacity = j.at("q_capacity");
  c.avg_net = j.at("avg_net");
  c.avg_capacity = j.at("avg_capacity");
  c.avg_batches = j.at("avg_batches");
  c.avg_batch_size = j.at("avg_batch_size");
  c.q_stored_policy = j.at("q_stored_policy");
  c.hidden_width = j.at("hidden_width");
  c.hidden_layers = j.at("hidden_layers");
  c.value_scale = j.at("value_scale");
  return c;
}

std::vector<double> PolicyFromAdvantages(std::span<const double> advantages) {
  for (double a : advantages) {
    if (std::isnan(a)) throw DivergenceError("NaN advantage network output");
  }
  return RegretMatching(advantages, RegretMatchingMode::kArgmax);
}

std::vector<double> AdvantagePolicy::ActionProbabilities(
    const InfostateKey& key, std::span<const ActionType> legal) const {
  const MlpParams* net = nets_.at(key.agent);
  if (net == nullptr) return UniformOver(legal.size());
  return NetPolicyAt(*net, EncodeInfostate(key), legal);
}

void QNetBaseline::Values(const GameState& state,
                          std::span<const ActionType> legal, int /*traverser*/,
                          std::span<double> out) const {
  const std::vector<float> q = Forward(net_, EncodeJointInfostate(state));
  for (size_t k = 0; k < legal.size(); ++k) {
    out[k] = scale_ * q[ActionSlot(legal[k])];
  }
}

void RecordTrajectory(const TrajectoryRecord& record, int t,
                      double value_scale, const CollectSinks& sinks, Rng& rng,
                      CollectResult& result) {
  const int traverser = record.traverser;
  double weight = 1.0;
  const TrajectoryStep* prev = nullptr;
  auto emit_transition = [&](const TrajectoryStep& from,
                             const TrajectoryStep* to) {
    if (sinks.transitions == nullptr) return;
    QTransition tr;
    tr.joint_features = EncodeJointInfostate(from.state);
    tr.action = ActionSlot(from.legal[from.action]);
    if (to == nullptr) {
      tr.terminal = true;
      tr.reward = static_cast<float>(record.terminal_reward / value_scale);
    } else {
      tr.next_actor = to->actor;
      tr.next_joint_features = EncodeJointInfostate(to->state);
      tr.next_features = EncodeInfostate(to->key);
      tr.next_mask = SlotMask(to->legal);
      tr.next_policy = Slotted(to->legal, to->policy);
    }
    sinks.transitions->Push(std::move(tr));
    ++result.transitions;
  };

  for (const TrajectoryStep& step : record.steps) {
    if (prev != nullptr) emit_transition(*prev, &step);
    prev = &step;
    if (step.actor == traverser) {
      if (sinks.advantages != nullptr) {
        AdvantageSample s;
        s.features = EncodeInfostate(step.key);
        for (size_t k = 0; k < step.legal.size(); ++k) {
          s.targets[ActionSlot(step.legal[k])] = static_cast<float>(
              (step.action_values[k] - step.value) / value_scale);
        }
        s.mask = SlotMask(step.legal);
        s.iteration = t;
        s.weight = static_cast<float>(weight);
        sinks.advantages->Add(std::move(s), rng);
        ++result.advantage_samples;
      }
      weight *= 1.0 / step.sample_prob;
    } else if (auto* sink = sinks.policies[step.actor]) {
      PolicySample s;
      s.features = EncodeInfostate(step.key);
      s.targets = Slotted(step.legal, step.policy);
      s.mask = SlotMask(step.legal);
      s.iteration = t;
      s.weight = static_cast<float>(weight);
      sink->Add(std::move(s), rng);
    }
  }
  if (prev != nullptr) emit_transition(*prev, nullptr);
}

CollectResult DreamCollect(GameId game, int t, int traverser,
                           const PolicySource& policy,
                           const BaselineSource& baseline, double epsilon,
                           int traversals, double value_scale,
                           const CollectSinks& sinks, Rng& rng) {
  CollectResult result;
  RngSampler sampler(rng);
  const GameState root = GameState::Initial(game);
  for (int n = 0; n < traversals; ++n) {
    const TrajectoryRecord record =
        OsTraverse(root, traverser, policy, epsilon, baseline, sampler);
    result.nodes_touched += record.nodes_touched;
    RecordTrajectory(record, t, value_scale, sinks, rng, result);
  }
  return result;
}

CollectResult EsCollect(GameId game, int t, int traverser,
                        const PolicySource& policy, int traversals,
                        double value_scale,
                        ReservoirBuffer<AdvantageSample>& sink, Rng& rng) {
  CollectResult result;
  RngSampler sampler(rng);
  const GameState root = GameState::Initial(game);
  for (int n = 0; n < traversals; ++n) {
    const EsResult es = EsTraverse(root, traverser, policy, sampler);
    result.nodes_touched += es.nodes_touched;
    for (const EsVisit& v : es.visits) {
      AdvantageSample s;
      s.features = EncodeInfostate(v.key);
      for (size_t k = 0; k < v.legal.size(); ++k) {
        s.targets[ActionSlot(v.legal[k])] =
            static_cast<float>(v.Regret(static_cast<int>(k)) / value_scale);
      }
      s.mask = SlotMask(v.legal);
      s.iteration = t;
      sink.Add(std::move(s), rng);
      ++result.advantage_samples;
    }
  }
  return result;
}

double QTarget(const QTransition& tr, std::span<const float> next_policy,
               std::span<const float> next_q) {
  if (tr.terminal) return tr.reward;
  double target = tr.reward;
  for (int k = 0; k < kNetOutputs; ++k) {
    if (tr.next_mask[k] > 0.0f) {
      target += static_cast<double>(next_policy[k]) * next_q[k];
    }
  }
  return target;
}

std::vector<std::array<float, kNetOutputs>> NextPolicies(
    const CircularBuffer<QTransition>& buffer,
    const std::function<std::array<float, kNetOutputs>(const QTransition&)>&
        policy_of) {
  std::vector<std::array<float, kNetOutputs>> out(buffer.size());
  for (int64_t i = 0; i < buffer.size(); ++i) {
    if (!buffer[i].terminal) out[i] = policy_of(buffer[i]);
  }
  return out;
}

TrainResult TrainQNet(MlpParams& net, AdamState& adam,
                      const CircularBuffer<QTransition>& buffer,
                      const std::vector<std::array<float, kNetOutputs>>& next_pi,
                      const TrainOptions& options, Rng& rng) {
  if (static_cast<int64_t>(next_pi.size()) != buffer.size()) {
    throw InvalidInputError("next-policy table does not match the buffer");
  }
  const int in = net.input_size();
  Matrix next_features;
  const BatchBuilder build = [&](std::span<const int64_t> idx,
                                 TrainBatch& batch) {
    const int n = static_cast<int>(idx.size());
    batch.Resize(n, in, kNetOutputs);
    next_features.setZero(n, in);
    for (int r = 0; r < n; ++r) {
      const QTransition& tr = buffer[idx[r]];
      for (int c = 0; c < in; ++c) batch.features(r, c) = tr.joint_features[c];
      if (!tr.terminal) {
        for (int c = 0; c < in; ++c) {
          next_features(r, c) = tr.next_joint_features[c];
        }
      }
    }
    const Matrix next_q = Forward(net, next_features);
    for (int r = 0; r < n; ++r) {
      const QTransition& tr = buffer[idx[r]];
      const float q[kNetOutputs] = {next_q(r, 0), next_q(r, 1), next_q(r, 2)};
      batch.targets(r, tr.action) =
          static_cast<float>(QTarget(tr, next_pi[idx[r]], q));
      batch.mask(r, tr.action) = 1.0f;
    }
  };
  return Train(net, adam, buffer.size(), build, options, rng);
}

TrainResult TrainSampleNet(MlpParams& net, AdamState& adam,
                           const ReservoirBuffer<AdvantageSample>& buffer,
                           Weighting weighting, const TrainOptions& options,
                           Rng& rng) {
  const int in = net.input_size();
  const BatchBuilder build = [&](std::span<const int64_t> idx,
                                 TrainBatch& batch) {
    const int n = static_cast<int>(idx.size());
    batch.Resize(n, in, kNetOutputs);
    for (int r = 0; r < n; ++r) {
      const AdvantageSample& s = buffer[idx[r]];
      for (int c = 0; c < in; ++c) batch.features(r, c) = s.features[c];
      for (int k = 0; k < kNetOutputs; ++k) {
        batch.targets(r, k) = s.targets[k];
        batch.mask(r, k) = s.mask[k];
      }
      batch.weights(r) =
          s.weight * static_cast<float>(IterationWeight(weighting, s.iteration));
    }
  };
  return Train(net, adam, buffer.size(), build, options, rng);
}

std::vector<double> AveragePolicyAt(const ModelArchive& archive, int agent,
                                    const InfostateKey& key,
                                    ArchiveWeighting weighting) {
  const auto& entries = archive.entries(agent);
  if (entries.empty()) throw InvalidInputError("empty model archive");
  const std::vector<OwnDecision> prefix = OwnDecisionPrefix(key);
  const std::vector<ActionType> legal = LegalActionsAt(key);
  std::vector<std::vector<float>> prefix_features;
  for (const OwnDecision& d : prefix) {
    prefix_features.push_back(EncodeInfostate(d.key));
  }
  const std::vector<float> features = EncodeInfostate(key);

  std::vector<double> num(legal.size(), 0.0);
  double den = 0.0;
  for (const ArchiveEntry& e : entries) {
    double reach = EntryWeight(weighting, e.iteration);
    for (size_t p = 0; p < prefix.size() && reach > 0.0; ++p) {
      reach *= NetPolicyAt(e.params, prefix_features[p],
                           prefix[p].legal)[prefix[p].action_index];
    }
    if (reach <= 0.0) continue;
    const std::vector<double> pi = NetPolicyAt(e.params, features, legal);
    for (size_t k = 0; k < legal.size(); ++k) num[k] += reach * pi[k];
    den += reach;
  }
  if (den <= 0.0) return UniformOver(legal.size());
  for (double& x : num) x /= den;
  return num;
}

TabularPolicy ArchiveAveragePolicy(const GameTree& tree,
                                   const ModelArchive& archive,
                                   ArchiveWeighting weighting) {
  TabularPolicy out;
  const auto& infosets = tree.infosets();
  for (int agent = 0; agent < 2; ++agent) {
    std::vector<int> ids;
    for (int i = 0; i < static_cast<int>(infosets.size()); ++i) {
      if (infosets[i].player == agent) ids.push_back(i);
    }
    const auto& entries = archive.entries(agent);
    if (ids.empty()) continue;
    if (entries.empty()) {
      for (int id : ids) {
        out.Set(infosets[id].key, UniformOver(infosets[id].legal.size()));
      }
      continue;
    }
    Matrix features(static_cast<int>(ids.size()),
                    entries.front().params.input_size());
    for (size_t r = 0; r < ids.size(); ++r) {
      const std::vector<float> f = EncodeInfostate(infosets[ids[r]].key);
      for (size_t c = 0; c < f.size(); ++c) features(r, c) = f[c];
    }
    std::vector<int> row_of(infosets.size(), -1);
    for (size_t r = 0; r < ids.size(); ++r) row_of[ids[r]] = static_cast<int>(r);

    std::vector<std::vector<double>> num(ids.size());
    std::vector<double> den(ids.size(), 0.0);
    std::vector<std::vector<double>> pi(ids.size());
    std::vector<double> reach(ids.size(), 0.0);
    for (size_t r = 0; r < ids.size(); ++r) {
      num[r].assign(infosets[ids[r]].legal.size(), 0.0);
    }
    for (const ArchiveEntry& e : entries) {
      const Matrix adv = Forward(e.params, features);
      const double w = EntryWeight(weighting, e.iteration);
      for (size_t r = 0; r < ids.size(); ++r) {
        const TreeInfoset& info = infosets[ids[r]];
        std::vector<double> a(info.legal.size());
        for (size_t k = 0; k < a.size(); ++k) {
          a[k] = adv(static_cast<int>(r), ActionSlot(info.legal[k]));
        }
        pi[r] = PolicyFromAdvantages(a);
        if (info.parent_infoset < 0) {
          reach[r] = 1.0;
        } else {
          const int pr = row_of[info.parent_infoset];
          if (pr < 0 || pr >= static_cast<int>(r)) {
            throw InvalidStateError("infoset parent out of order");
          }
          reach[r] = reach[pr] * pi[pr][info.parent_action];
        }
        for (size_t k = 0; k < a.size(); ++k) {
          num[r][k] += w * reach[r] * pi[r][k];
        }
        den[r] += w * reach[r];
      }
    }
    for (size_t r = 0; r < ids.size(); ++r) {
      if (den[r] <= 0.0) {
        out.Set(infosets[ids[r]].key, UniformOver(num[r].size()));
        continue;
      }
      for (double& x : num[r]) x /= den[r];
      out.Set(infosets[ids[r]].key, std::move(num[r]));
    }
  }
  return out;
}

std::vector<double> ArchivePolicy::ActionProbabilities(
    const InfostateKey& key, std::span<const ActionType> legal) const {
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    std::vector<double> probs =
        archive_.entries(key.agent).empty()
            ? UniformOver(legal.size())
            : AveragePolicyAt(archive_, key.agent, key, weighting_);
    it = cache_.emplace(key, std::move(probs)).first;
  }
  if (it->second.size() != legal.size()) {
    throw InvalidInputError("legal action count mismatch");
  }
  return it->second;
}

std::vector<double> AverageNetPolicy::ActionProbabilities(
    const InfostateKey& key, std::span<const ActionType> legal) const {
  const MlpParams* net = nets_.at(key.agent);
  if (net == nullptr) return UniformOver(legal.size());
  const std::array<float, kNetOutputs> mask = SlotMask(legal);
  const std::vector<float> out =
      Forward(*net, EncodeInfostate(key), OutputHead::kSoftmax, mask);
  std::vector<double> probs(legal.size());
  double total = 0.0;
  for (size_t k = 0; k < legal.size(); ++k) {
    probs[k] = out[ActionSlot(legal[k])];
    total += probs[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DivergenceError("average network produced no probability mass");
  }
  for (double& p : probs) p /= total;
  return probs;
}

Trainer::Trainer(TrainerConfig config) : config_(std::move(config)) {
  config_.Validate();
  const std::vector<int> adv_dims =
      DefaultDims(EncodingSize(config_.game), kNetOutputs,
                  config_.hidden_width, config_.hidden_layers);
  const std::vector<int> q_dims =
      DefaultDims(JointEncodingSize(config_.game), kNetOutputs,
                  config_.hidden_width, config_.hidden_layers);
  for (int a = 0; a < 2; ++a) {
    adv_[a] = MlpInit(adv_dims, StreamSeed(0, 10 + a));
    adv_adam_[a].Reset(adv_[a]);
    q_[a] = MlpInit(q_dims, StreamSeed(0, 20 + a));
    q_adam_[a].Reset(q_[a]);
    avg_[a] = MlpInit(adv_dims, StreamSeed(0, 30 + a));
    avg_adam_[a].Reset(avg_[a]);
    adv_buffer_[a] = ReservoirBuffer<AdvantageSample>(config_.adv_capacity);
    q_buffer_[a] = CircularBuffer<QTransition>(config_.q_capacity);
    avg_buffer_[a] = ReservoirBuffer<PolicySample>(
        config_.avg_net ? config_.avg_capacity : 0);
  }
}

uint64_t Trainer::StreamSeed(int t, int purpose) const {
  return MixSeed(MixSeed(config_.seed, static_cast<uint64_t>(t)),
                 static_cast<uint64_t>(purpose));
}

bool Trainer::ResetsAt(int t) const {
  switch (config_.reset) {
    case ResetMode::kAlways:
      return true;
    case ResetMode::kNever:
      return false;
    case ResetMode::kEvery10:
      return t % 10 == 0 || t % 10 == 1;
  }
  return true;
}

AdvantagePolicy Trainer::CurrentPolicy() const {
  return AdvantagePolicy({adv_ready_[0] ? &adv_[0] : nullptr,
                          adv_ready_[1] ? &adv_[1] : nullptr});
}

IterationReport Trainer::RunIteration() {
  const auto start = std::chrono::steady_clock::now();
  const int t = t_ + 1;
  const int i = t % 2;
  IterationReport report;
  report.iteration = t;
  report.traverser = i;

  const AdvantagePolicy policy = CurrentPolicy();
  Rng collect_rng(StreamSeed(t, 0));
  CollectSinks sinks;
  sinks.advantages = &adv_buffer_[i];
  if (config_.avg_net) {
    sinks.policies = {&avg_buffer_[0], &avg_buffer_[1]};
    sinks.policies[i] = nullptr;
  }
  CollectResult collected;
  switch (config_.algorithm) {
    case Algorithm::kEsSdCfr:
      collected = EsCollect(config_.game, t, i, policy, config_.traversals,
                            config_.value_scale, adv_buffer_[i], collect_rng);
      break;
    case Algorithm::kOsSdCfr:
      collected = DreamCollect(config_.game, t, i, policy, ZeroBaseline(),
                               config_.epsilon, config_.traversals,
                               config_.value_scale, sinks, collect_rng);
      break;
    case Algorithm::kDream: {
      sinks.transitions = &q_buffer_[i];
      const QNetBaseline baseline(q_[i], config_.value_scale);
      collected = DreamCollect(config_.game, t, i, policy, baseline,
                               config_.epsilon, config_.traversals,
                               config_.value_scale, sinks, collect_rng);
      break;
    }
  }
  report.nodes_touched = collected.nodes_touched;
  nodes_total_ += collected.nodes_touched;

  if (config_.algorithm == Algorithm::kDream) {
    const auto policy_of = [&](const QTransition& tr) {
      if (config_.q_stored_policy) return tr.next_policy;
      std::array<float, kNetOutputs> out{};
      std::vector<int> slots;
      for (int k = 0; k < kNetOutputs; ++k) {
        if (tr.next_mask[k] > 0.0f) slots.push_back(k);
      }
      if (!adv_ready_[tr.next_actor]) {
        for (int k : slots) out[k] = 1.0f / static_cast<float>(slots.size());
        return out;
      }
      const std::vector<float> a = Forward(adv_[tr.next_actor], tr.next_features);
      std::vector<double> adv;
      for (int k : slots) adv.push_back(a[k]);
      const std::vector<double> pi = PolicyFromAdvantages(adv);
      for (size_t k = 0; k < slots.size(); ++k) {
        out[slots[k]] = static_cast<float>(pi[k]);
      }
      return out;
    };
    const auto next_pi = NextPolicies(q_buffer_[i], policy_of);
    TrainOptions q_opts;
    q_opts.batches = config_.q_batches;
    q_opts.batch_size = config_.q_batch_size;
    q_opts.lr = config_.lr;
    q_opts.clip = config_.clip;
    Rng q_rng(StreamSeed(t, 1));
    const TrainResult q =
        TrainQNet(q_[i], q_adam_[i], q_buffer_[i], next_pi, q_opts, q_rng);
    report.q_loss = q.last_loss;
  }

  const bool reset = ResetsAt(t) || !adv_ready_[i];
  TrainOptions d_opts;
  d_opts.batches =
      reset ? config_.adv_batches_scratch : config_.adv_batches_finetune;
  d_opts.batch_size = config_.adv_batch_size;
  d_opts.lr = config_.lr;
  d_opts.clip = config_.clip;
  d_opts.reset = reset;
  d_opts.init_seed = StreamSeed(t, 3);
  Rng d_rng(StreamSeed(t, 2));
  const TrainResult d = TrainSampleNet(adv_[i], adv_adam_[i], adv_buffer_[i],
                                       config_.weighting, d_opts, d_rng);
  report.d_loss = d.last_loss;
  report.d_reset = reset;
  adv_ready_[i] = true;
  archive_.Add(i, t, adv_[i]);

  t_ = t;
  report.total_nodes_touched = nodes_total_;
  report.adv_buffer_size = adv_buffer_[i].size();
  report.q_buffer_size = q_buffer_[i].size();
  report.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return report;
}

TrainResult Trainer::TrainAverageNet(int agent) {
  if (!config_.avg_net) {
    throw InvalidInputError("average network collection is disabled");
  }
  if (avg_buffer_.at(agent).empty()) {
    throw InvalidInputError("empty average-policy buffer");
  }
  TrainOptions opts;
  opts.batches = config_.avg_batches;
  opts.batch_size = config_.avg_batch_size;
  opts.lr = config_.lr;
  opts.clip = config_.clip;
  opts.head = OutputHead::kSoftmax;
  opts.reset = true;
  opts.init_seed = StreamSeed(t_, 40 + agent);
  Rng rng(StreamSeed(t_, 50 + agent));
  return TrainSampleNet(avg_[agent], avg_adam_[agent], avg_buffer_[agent],
                        config_.weighting, opts, rng);
}

void Trainer::SaveCheckpoint(const std::string& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "config.json", std::ios::trunc);
    out << TrainerConfigToJson(config_) << "\n";
    if (!out) throw Error("cannot write " + dir + "/config.json");
  }
  const fs::path tmp = fs::path(dir) / "state.bin.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    BinaryWriter w(out);
    w.Str(kCheckpointMagic);
    w.I64(t_);
    w.I64(nodes_total_);
    for (int a = 0; a < 2; ++a) {
      w.U32(adv_ready_[a] ? 1 : 0);
      WriteParams(w, adv_[a]);
      WriteAdam(w, adv_adam_[a]);
      WriteParams(w, q_[a]);
      WriteAdam(w, q_adam_[a]);
      WriteParams(w, avg_[a]);
      WriteAdam(w, avg_adam_[a]);
      WriteReservoir(w, adv_buffer_[a]);
      WriteReservoir(w, avg_buffer_[a]);
      w.U64(q_buffer_[a].size());
      for (int64_t k = 0; k < q_buffer_[a].size(); ++k) {
        WriteTransition(w, q_buffer_[a][k]);
      }
    }
    if (!w.ok()) throw Error("cannot write checkpoint state in " + dir);
  }
  fs::rename(tmp, fs::path(dir) / "state.bin");
  const fs::path archive_dir = fs::path(dir) / "archive";
  fs::remove_all(archive_dir);
  archive_.Save(archive_dir.string(), config_.game);
}

Trainer Trainer::LoadCheckpoint(const std::string& dir) {
  std::ifstream cfg(fs::path(dir) / "config.json");
  if (!cfg) throw InvalidInputError("no checkpoint in " + dir);
  const std::string text((std::istreambuf_iterator<char>(cfg)),
                         std::istreambuf_iterator<char>());
  Trainer trainer(TrainerConfigFromJson(text));
  std::ifstream in(fs::path(dir) / "state.bin", std::ios::binary);
  if (!in) throw InvalidInputError("missing state.bin in " + dir);
  BinaryReader r(in);
  if (r.Str() != kCheckpointMagic) {
    throw InvalidInputError("not a checkpoint: " + dir);
  }
  trainer.t_ = static_cast<int>(r.I64());
  trainer.nodes_total_ = r.I64();
  for (int a = 0; a < 2; ++a) {
    trainer.adv_ready_[a] = r.U32() != 0;
    trainer.adv_[a] = ReadParams(r);
    trainer.adv_adam_[a] = ReadAdam(r);
    trainer.q_[a] = ReadParams(r);
    trainer.q_adam_[a] = ReadAdam(r);
    trainer.avg_[a] = ReadParams(r);
    trainer.avg_adam_[a] = ReadAdam(r);
    ReadReservoir(r, trainer.adv_buffer_[a]);
    ReadReservoir(r, trainer.avg_buffer_[a]);
    std::vector<QTransition> items(r.Size());
    for (auto& q : items) q = ReadTransition(r);
    trainer.q_buffer_[a].Restore(std::move(items));
  }
  trainer.archive_ = ModelArchive::Load((fs::path(dir) / "archive").string());
  return trainer;
}

bool Trainer::operator==(const Trainer& o) const {
  if (!(config_ == o.config_) || t_ != o.t_ || nodes_total_ != o.nodes_total_ ||
      adv_ready_ != o.adv_ready_ || !(archive_ == o.archive_)) {
    return false;
  }
  for (int a = 0; a < 2; ++a) {
    if (!(adv_[a] == o.adv_[a]) || !(adv_adam_[a] == o.adv_adam_[a]) ||
        !(q_[a] == o.q_[a]) || !(q_adam_[a] == o.q_adam_[a]) ||
        !(avg_[a] == o.avg_[a]) || !(avg_adam_[a] == o.avg_adam_[a]) ||
        adv_buffer_[a].items() != o.adv_buffer_[a].items() ||
        adv_buffer_[a].seen() != o.adv_buffer_[a].seen() ||
        avg_buffer_[a].items() != o.avg_buffer_[a].items() ||
        q_buffer_[a].Items() != o.q_buffer_[a].Items()) {
      return false;
    }
  }
  return true;
}

}  // namespace dreamcfr
