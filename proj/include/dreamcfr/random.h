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

#ifndef DREAMCFR_RANDOM_H_
#define DREAMCFR_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace dreamcfr {

// Seeded 64-bit generator. Distributions are implemented here rather than
// with <random> distribution objects so that streams are reproducible across
// standard library implementations and the full state is serializable.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n). n must be positive.
  int64_t UniformInt(int64_t n);
  // Index drawn from an unnormalized non-negative weight vector.
  int SampleIndex(std::span<const double> weights);

  std::string SaveState() const;
  void LoadState(const std::string& state);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Source of the random choices made during a sampled traversal. Traversals
// talk to this interface so tests can replay every possible trajectory.
class Sampler {
 public:
  virtual ~Sampler() = default;
  // Draws an index with probability probs[k]. Entries sum to one.
  virtual int SampleIndex(std::span<const double> probs) = 0;
  // Draws uniformly from [0, n).
  virtual int64_t SampleUniform(int64_t n) = 0;
};

class RngSampler : public Sampler {
 public:
  explicit RngSampler(Rng& rng) : rng_(rng) {}
  int SampleIndex(std::span<const double> probs) override {
    return rng_.SampleIndex(probs);
  }
  int64_t SampleUniform(int64_t n) override { return rng_.UniformInt(n); }

 private:
  Rng& rng_;
};

// Derives an independent child seed; used to give each network, hand or run
// its own stream.
uint64_t MixSeed(uint64_t seed, uint64_t salt);

}  // namespace dreamcfr

#endif  // DREAMCFR_RANDOM_H_
