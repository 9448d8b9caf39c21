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

#include "dreamcfr/random.h"

#include <sstream>

#include "dreamcfr/errors.h"

namespace dreamcfr {

int64_t Rng::UniformInt(int64_t n) {
  if (n <= 0) throw InvalidInputError("UniformInt requires n > 0");
  // Rejection sampling keeps the draw exactly uniform.
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<int64_t>(x % un);
}

int Rng::SampleIndex(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw SamplingError("cannot sample from zero weights");
  const double u = Uniform() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    acc += weights[k];
    if (u < acc) return k;
  }
  return last_positive;
}

std::string Rng::SaveState() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::LoadState(const std::string& state) {
  std::istringstream in(state);
  in >> engine_;
  if (!in) throw InvalidInputError("corrupt generator state");
}

uint64_t MixSeed(uint64_t seed, uint64_t salt) {
  // splitmix64 finalizer over the combined words.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace dreamcfr
