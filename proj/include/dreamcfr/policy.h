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

#ifndef DREAMCFR_POLICY_H_
#define DREAMCFR_POLICY_H_

#include <array>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dreamcfr/infostate.h"

namespace dreamcfr {

// Maps an infostate to a distribution over its legal actions. One source
// covers both agents; the acting agent is key.agent.
class PolicySource {
 public:
  virtual ~PolicySource() = default;
  virtual std::vector<double> ActionProbabilities(
      const InfostateKey& key, std::span<const ActionType> legal) const = 0;
};

class UniformPolicy : public PolicySource {
 public:
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override;
};

// Per-infostate probability vectors; infostates without an entry play
// uniformly.
class TabularPolicy : public PolicySource {
 public:
  void Set(const InfostateKey& key, std::vector<double> probs);
  const std::vector<double>* Find(const InfostateKey& key) const;
  size_t size() const { return table_.size(); }
  const auto& table() const { return table_; }

  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override;

 private:
  std::unordered_map<InfostateKey, std::vector<double>, InfostateKeyHash>
      table_;
};

class FunctionPolicy : public PolicySource {
 public:
  using Fn = std::function<std::vector<double>(const InfostateKey&,
                                               std::span<const ActionType>)>;
  explicit FunctionPolicy(Fn fn) : fn_(std::move(fn)) {}
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override {
    return fn_(key, legal);
  }

 private:
  Fn fn_;
};

// Plays the first listed action type that is legal, e.g. {kCall} for a
// calling station or {kRaise, kCall} for a maniac.
class PreferencePolicy : public PolicySource {
 public:
  explicit PreferencePolicy(std::vector<ActionType> order)
      : order_(std::move(order)) {}
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override;

 private:
  std::vector<ActionType> order_;
};

// Uses `first` for agent 0 and `second` for agent 1.
class CombinedPolicy : public PolicySource {
 public:
  CombinedPolicy(const PolicySource& first, const PolicySource& second)
      : sources_{&first, &second} {}
  std::vector<double> ActionProbabilities(
      const InfostateKey& key,
      std::span<const ActionType> legal) const override {
    return sources_[key.agent]->ActionProbabilities(key, legal);
  }

 private:
  std::array<const PolicySource*, 2> sources_;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_POLICY_H_
