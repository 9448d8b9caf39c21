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

#ifndef DREAMCFR_BUFFERS_H_
#define DREAMCFR_BUFFERS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dreamcfr/binary_io.h"
#include "dreamcfr/errors.h"
#include "dreamcfr/game.h"
#include "dreamcfr/mlp.h"
#include "dreamcfr/random.h"

namespace dreamcfr {

// Classic reservoir sampling.
template <typename T>
class ReservoirBuffer {
 public:
  explicit ReservoirBuffer(int64_t capacity = 0) : capacity_(capacity) {}

  void Add(T item, Rng& rng) {
    ++seen_;
    if (static_cast<int64_t>(items_.size()) < capacity_) {
      items_.push_back(std::move(item));
      return;
    }
    const int64_t slot = rng.UniformInt(seen_);
    if (slot < capacity_) items_[slot] = std::move(item);
  }

  int64_t size() const { return static_cast<int64_t>(items_.size()); }
  int64_t capacity() const { return capacity_; }
  int64_t seen() const { return seen_; }
  bool empty() const { return items_.empty(); }
  const T& operator[](int64_t i) const { return items_[i]; }
  const std::vector<T>& items() const { return items_; }

  void Clear() {
    items_.clear();
    seen_ = 0;
  }
  void Restore(std::vector<T> items, int64_t seen) {
    if (static_cast<int64_t>(items.size()) > capacity_ ||
        seen < static_cast<int64_t>(items.size())) {
      throw InvalidInputError("inconsistent reservoir snapshot");
    }
    items_ = std::move(items);
    seen_ = seen;
  }

 private:
  int64_t capacity_;
  int64_t seen_ = 0;
  std::vector<T> items_;
};

// Fixed-capacity ring that overwrites the oldest item.
template <typename T>
class CircularBuffer {
 public:
  explicit CircularBuffer(int64_t capacity = 0) : capacity_(capacity) {}

  void Push(T item) {
    if (capacity_ <= 0) return;
    if (static_cast<int64_t>(ring_.size()) < capacity_) {
      ring_.push_back(std::move(item));
      return;
    }
    ring_[start_] = std::move(item);
    start_ = (start_ + 1) % capacity_;
  }

  int64_t size() const { return static_cast<int64_t>(ring_.size()); }
  int64_t capacity() const { return capacity_; }
  bool empty() const { return ring_.empty(); }
  // Oldest first.
  const T& operator[](int64_t i) const {
    return ring_[(start_ + i) % static_cast<int64_t>(ring_.size())];
  }
  std::vector<T> Items() const {
    std::vector<T> out;
    for (int64_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
    return out;
  }
  void Restore(std::vector<T> oldest_first) {
    if (static_cast<int64_t>(oldest_first.size()) > capacity_) {
      throw InvalidInputError("circular snapshot exceeds capacity");
    }
    ring_ = std::move(oldest_first);
    start_ = 0;
  }

 private:
  int64_t capacity_;
  int64_t start_ = 0;
  std::vector<T> ring_;
};

inline constexpr int kNetOutputs = kNumActionTypes;

// Training record for the advantage network (targets are sampled
// advantages) and for the average-policy network (targets are policies).
struct AdvantageSample {
  std::vector<float> features;
  std::array<float, kNetOutputs> targets{};
  std::array<float, kNetOutputs> mask{};  // 1 for legal actions
  int iteration = 0;
  float weight = 1.0f;

  bool operator==(const AdvantageSample&) const = default;
};
using PolicySample = AdvantageSample;

// Expected-SARSA transition between consecutive decision points.
struct QTransition {
  std::vector<float> joint_features;  // s*(h)
  int action = 0;                     // action slot taken at h
  float reward = 0.0f;                // traverser reward on the segment
  bool terminal = false;
  int next_actor = -1;
  std::vector<float> next_joint_features;  // s*(h')
  std::vector<float> next_features;        // next actor's own infostate
  std::array<float, kNetOutputs> next_mask{};
  std::array<float, kNetOutputs> next_policy{};  // policy when collected

  bool operator==(const QTransition&) const = default;
};

void WriteSample(BinaryWriter& w, const AdvantageSample& s);
AdvantageSample ReadSample(BinaryReader& r);
void WriteTransition(BinaryWriter& w, const QTransition& q);
QTransition ReadTransition(BinaryReader& r);

enum class ArchiveWeighting { kUniform, kLinear };

struct ArchiveEntry {
  int iteration = 0;
  MlpParams params;
};

// Per-agent list of the advantage networks of every iteration.
class ModelArchive {
 public:
  // Iterations must be strictly increasing per agent.
  void Add(int agent, int iteration, MlpParams params);
  const std::vector<ArchiveEntry>& entries(int agent) const {
    return entries_.at(agent);
  }
  int64_t size(int agent) const { return entries_.at(agent).size(); }
  bool empty() const { return entries_[0].empty() && entries_[1].empty(); }

  // Uniform: equal probability. Linear: probability t / sum t.
  const ArchiveEntry& Sample(int agent, Rng& rng,
                             ArchiveWeighting weighting) const;
  std::vector<double> SamplingWeights(int agent,
                                      ArchiveWeighting weighting) const;

  // One DRMNET1 file per (agent, iteration) plus index.json.
  void Save(const std::string& dir, GameId game) const;
  static ModelArchive Load(const std::string& dir, GameId* game = nullptr);

  bool operator==(const ModelArchive& other) const = default;

 private:
  std::array<std::vector<ArchiveEntry>, 2> entries_;
};

inline bool operator==(const ArchiveEntry& a, const ArchiveEntry& b) {
  return a.iteration == b.iteration && a.params == b.params;
}

}  // namespace dreamcfr

#endif  // DREAMCFR_BUFFERS_H_
