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

#include "dreamcfr/policy.h"

#include <algorithm>

#include "dreamcfr/errors.h"

namespace dreamcfr {

std::vector<double> UniformPolicy::ActionProbabilities(
    const InfostateKey&, std::span<const ActionType> legal) const {
  return std::vector<double>(legal.size(), 1.0 / legal.size());
}

void TabularPolicy::Set(const InfostateKey& key, std::vector<double> probs) {
  table_[key] = std::move(probs);
}

const std::vector<double>* TabularPolicy::Find(const InfostateKey& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<double> TabularPolicy::ActionProbabilities(
    const InfostateKey& key, std::span<const ActionType> legal) const {
  const std::vector<double>* probs = Find(key);
  if (probs == nullptr) {
    return std::vector<double>(legal.size(), 1.0 / legal.size());
  }
  if (probs->size() != legal.size()) {
    throw InvalidInputError("policy entry size mismatch at " + key.ToString());
  }
  return *probs;
}

std::vector<double> PreferencePolicy::ActionProbabilities(
    const InfostateKey&, std::span<const ActionType> legal) const {
  std::vector<double> probs(legal.size(), 0.0);
  for (ActionType want : order_) {
    auto it = std::find(legal.begin(), legal.end(), want);
    if (it != legal.end()) {
      probs[it - legal.begin()] = 1.0;
      return probs;
    }
  }
  probs[0] = 1.0;
  return probs;
}

}  // namespace dreamcfr
