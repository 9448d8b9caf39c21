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

#include "dreamcfr/variance_probe.h"

#include <map>
#include <string>

#include "dreamcfr/errors.h"

namespace dreamcfr {
namespace {

struct Welford {
  int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void Add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
};

}  // namespace

const char* EstimatorName(Estimator e) {
  switch (e) {
    case Estimator::kOs:
      return "os";
    case Estimator::kOsTabular:
      return "os-tabular";
    case Estimator::kOsLearned:
      return "os-learned";
    case Estimator::kOsOracle:
      return "os-oracle";
    case Estimator::kEs:
      return "es";
  }
  return "?";
}

Estimator ParseEstimator(std::string_view name) {
  for (Estimator e : {Estimator::kOs, Estimator::kOsTabular,
                      Estimator::kOsLearned, Estimator::kOsOracle,
                      Estimator::kEs}) {
    if (name == EstimatorName(e)) return e;
  }
  throw InvalidInputError("unknown estimator: " + std::string(name));
}

VarianceProbeResult VarianceProbe(const GameState& root,
                                  const PolicySource& policy,
                                  const ProbeOptions& options, Rng& rng) {
  if (options.samples < 1) throw InvalidInputError("samples must be positive");
  if (options.estimator == Estimator::kOsLearned &&
      (options.learned[0] == nullptr || options.learned[1] == nullptr)) {
    throw InvalidInputError("learned estimator needs a baseline per agent");
  }
  RngSampler sampler(rng);
  const ZeroBaseline zero;
  const OracleBaseline oracle(policy);
  BaselineTable table;
  std::map<std::pair<InfostateKey, int>, Welford> stats;
  VarianceProbeResult result;

  for (int n = 0; n < options.samples; ++n) {
    const int traverser = n % 2;
    if (options.estimator == Estimator::kEs) {
      const EsResult es = EsTraverse(root, traverser, policy, sampler);
      result.nodes_touched += es.nodes_touched;
      for (const EsVisit& v : es.visits) {
        const InfostateKey joint = JointKeyOf(v.state);
        for (size_t a = 0; a < v.legal.size(); ++a) {
          stats[{joint, static_cast<int>(a)}].Add(v.action_values[a]);
        }
      }
      continue;
    }
    const BaselineSource* baseline = &zero;
    switch (options.estimator) {
      case Estimator::kOsTabular:
        baseline = &table;
        break;
      case Estimator::kOsLearned:
        baseline = options.learned[traverser];
        break;
      case Estimator::kOsOracle:
        baseline = &oracle;
        break;
      default:
        break;
    }
    const TrajectoryRecord rec = OsTraverse(root, traverser, policy,
                                            options.epsilon, *baseline, sampler);
    result.nodes_touched += rec.nodes_touched;
    for (const TrajectoryStep& s : rec.steps) {
      if (s.actor != traverser) continue;
      const InfostateKey joint = JointKeyOf(s.state);
      for (size_t a = 0; a < s.legal.size(); ++a) {
        stats[{joint, static_cast<int>(a)}].Add(s.action_values[a]);
      }
    }
    if (options.estimator == Estimator::kOsTabular) {
      UpdateBaselines(table, rec);
    }
  }

  double weighted = 0.0;
  int64_t weight = 0;
  for (const auto& [cell, w] : stats) {
    VarianceCell c;
    c.key = cell.first;
    c.action = cell.second;
    c.count = w.n;
    c.mean = w.mean;
    c.variance = w.n > 1 ? w.m2 / static_cast<double>(w.n - 1) : 0.0;
    if (w.n > 1) {
      weighted += static_cast<double>(w.n) * c.variance;
      weight += w.n;
    }
    result.cells.push_back(std::move(c));
  }
  result.aggregate = weight > 0 ? weighted / static_cast<double>(weight) : 0.0;
  return result;
}

}  // namespace dreamcfr
