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

#ifndef DREAMCFR_VARIANCE_PROBE_H_
#define DREAMCFR_VARIANCE_PROBE_H_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "dreamcfr/infostate.h"
#include "dreamcfr/mc_sampling.h"
#include "dreamcfr/policy.h"
#include "dreamcfr/random.h"

namespace dreamcfr {

enum class Estimator { kOs, kOsTabular, kOsLearned, kOsOracle, kEs };

const char* EstimatorName(Estimator e);
Estimator ParseEstimator(std::string_view name);

struct ProbeOptions {
  Estimator estimator = Estimator::kOs;
  double epsilon = 0.5;
  int samples = 1000;  // traversals, alternating traverser
  // Per-traverser baselines for kOsLearned.
  std::array<const BaselineSource*, 2> learned{nullptr, nullptr};
};

struct VarianceCell {
  InfostateKey key;  // joint key s*(h) of the traverser's decision point
  int action = 0;
  int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance, chips^2
};

struct VarianceProbeResult {
  std::vector<VarianceCell> cells;
  // Visit-weighted mean of the cell variances (cells seen at least twice).
  double aggregate = 0.0;
  int64_t nodes_touched = 0;
};

// Empirical variance of the per-action value estimates at the traverser's
// decision points under fixed policies.
VarianceProbeResult VarianceProbe(const GameState& root,
                                  const PolicySource& policy,
                                  const ProbeOptions& options, Rng& rng);

}  // namespace dreamcfr

#endif  // DREAMCFR_VARIANCE_PROBE_H_
