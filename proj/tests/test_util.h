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

#ifndef DREAMCFR_TESTS_TEST_UTIL_H_
#define DREAMCFR_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "dreamcfr/game.h"
#include "dreamcfr/game_tree.h"
#include "dreamcfr/mlp.h"
#include "dreamcfr/buffers.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/policy.h"
#include "dreamcfr/random.h"

namespace dreamcfr::testing {

// Kuhn equilibrium family (cards J=0, Q=1, K=2), parameterized by the
// first player's jack bluffing frequency alpha in [0, 1/3].
inline FunctionPolicy KuhnNash(double alpha) {
  return FunctionPolicy([alpha](const InfostateKey& key,
                                std::span<const ActionType> legal) {
    const int card = key.holes[2 * key.agent];
    const auto& h = key.actions;
    double raise = 0.0;  // probability of the aggressive/continuing action
    if (key.agent == 0 && h.empty()) {
      raise = card == 0 ? alpha : card == 1 ? 0.0 : 3 * alpha;
    } else if (key.agent == 0) {  // check, bet: call or fold
      raise = card == 0 ? 0.0 : card == 1 ? alpha + 1.0 / 3 : 1.0;
    } else if (h[0] == ActionType::kCall) {  // after a check: bet or check
      raise = card == 0 ? 1.0 / 3 : card == 1 ? 0.0 : 1.0;
    } else {  // facing a bet: call or fold
      raise = card == 0 ? 0.0 : card == 1 ? 1.0 / 3 : 1.0;
    }
    std::vector<double> probs(legal.size(), 0.0);
    if (legal[0] == ActionType::kFold) {
      probs[0] = 1.0 - raise;  // fold
      probs[1] = raise;        // call
    } else {
      probs[0] = 1.0 - raise;  // check
      probs[1] = raise;        // bet
    }
    return probs;
  });
}

inline constexpr double kKuhnValueP0 = -100.0 / 18.0;

// Brute-force best response: enumerates every pure strategy of `exploiter`.
inline double BruteForceBestResponse(const GameTree& tree,
                                     const PolicySource& policy,
                                     int exploiter) {
  std::vector<int> mine;
  for (size_t i = 0; i < tree.infosets().size(); ++i) {
    if (tree.infosets()[i].player == exploiter) mine.push_back(i);
  }
  std::vector<int> pick(mine.size(), 0);
  double best = -1e300;
  while (true) {
    TabularPolicy pure;
    for (size_t k = 0; k < mine.size(); ++k) {
      const TreeInfoset& info = tree.infosets()[mine[k]];
      std::vector<double> probs(info.legal.size(), 0.0);
      probs[pick[k]] = 1.0;
      pure.Set(info.key, probs);
    }
    const CombinedPolicy profile = exploiter == 0
                                       ? CombinedPolicy(pure, policy)
                                       : CombinedPolicy(policy, pure);
    const double v0 = ExpectedValue(tree, profile);
    best = std::max(best, exploiter == 0 ? v0 : -v0);
    size_t k = 0;
    while (k < mine.size()) {
      const int n = tree.infosets()[mine[k]].legal.size();
      if (++pick[k] < n) break;
      pick[k] = 0;
      ++k;
    }
    if (k == mine.size()) break;
  }
  return best;
}

// Sampler that walks every sequence of random choices in depth-first order.
// Each run replays a script; unscripted calls pick the first option with
// non-zero probability and extend the script.
class EnumeratingSampler : public Sampler {
 public:
  int SampleIndex(std::span<const double> probs) override {
    std::vector<double> p(probs.begin(), probs.end());
    return Choose(std::move(p));
  }
  int64_t SampleUniform(int64_t n) override {
    return Choose(std::vector<double>(n, 1.0 / n));
  }

  double probability() const { return probability_; }

  // Calls fn(sampler) once per path; fn reads probability() at the end.
  static void ForEachPath(const std::function<void(EnumeratingSampler&)>& fn) {
    EnumeratingSampler s;
    while (true) {
      s.pos_ = 0;
      s.probability_ = 1.0;
      fn(s);
      if (!s.Advance()) return;
    }
  }

 private:
  int Choose(std::vector<double> probs) {
    int choice;
    if (pos_ < script_.size()) {
      choice = script_[pos_];
      options_[pos_] = std::move(probs);
    } else {
      choice = 0;
      while (probs[choice] <= 0.0) ++choice;
      script_.push_back(choice);
      options_.push_back(std::move(probs));
    }
    probability_ *= options_[pos_][choice];
    ++pos_;
    return choice;
  }

  bool Advance() {
    script_.resize(pos_);
    options_.resize(pos_);
    while (!script_.empty()) {
      const std::vector<double>& opts = options_.back();
      int next = script_.back() + 1;
      while (next < static_cast<int>(opts.size()) && opts[next] <= 0.0) ++next;
      if (next < static_cast<int>(opts.size())) {
        script_.back() = next;
        return true;
      }
      script_.pop_back();
      options_.pop_back();
    }
    return false;
  }

  std::vector<int> script_;
  std::vector<std::vector<double>> options_;
  size_t pos_ = 0;
  double probability_ = 1.0;
};

// Sampler replaying fixed choices.
class ScriptedSampler : public Sampler {
 public:
  explicit ScriptedSampler(std::vector<int64_t> choices)
      : choices_(std::move(choices)) {}
  int SampleIndex(std::span<const double>) override {
    return static_cast<int>(choices_.at(pos_++));
  }
  int64_t SampleUniform(int64_t) override { return choices_.at(pos_++); }

 private:
  std::vector<int64_t> choices_;
  size_t pos_ = 0;
};

// Counterfactual values normalized by external reach, computed by full-tree
// recursion: for each infoset of `player`, sum_h x_-i(h) v(h, a) / sum_h x_-i(h).
struct CounterfactualValues {
  std::map<InfostateKey, std::vector<double>> action_values;
  std::map<InfostateKey, double> external_reach;
};

inline CounterfactualValues ComputeCounterfactualValues(
    const GameTree& tree, const PolicySource& policy, int player) {
  const auto& nodes = tree.nodes();
  const auto sigma = TabulateOnTree(tree, policy);
  const double sign = player == 0 ? 1.0 : -1.0;
  std::vector<double> value(nodes.size());
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const TreeNode& n = nodes[i];
    if (n.kind == NodeKind::kTerminal) {
      value[i] = sign * n.payoff0;
      continue;
    }
    double v = 0.0;
    for (int k = 0; k < n.num_children; ++k) {
      const int c = n.first_child + k;
      v += (n.kind == NodeKind::kChance ? nodes[c].chance_prob
                                        : sigma[n.infoset][k]) * value[c];
    }
    value[i] = v;
  }
  std::vector<double> reach(nodes.size(), 0.0);
  reach[0] = 1.0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    for (int k = 0; k < n.num_children; ++k) {
      const int c = n.first_child + k;
      double p = 1.0;
      if (n.kind == NodeKind::kChance) p = nodes[c].chance_prob;
      if (n.kind == NodeKind::kDecision && n.player != player) {
        p = sigma[n.infoset][k];
      }
      reach[c] = reach[i] * p;
    }
  }
  CounterfactualValues out;
  for (const TreeInfoset& info : tree.infosets()) {
    if (info.player != player) continue;
    std::vector<double> q(info.legal.size(), 0.0);
    double total = 0.0;
    for (int h : info.nodes) {
      total += reach[h];
      for (size_t a = 0; a < q.size(); ++a) {
        q[a] += reach[h] * value[nodes[h].first_child + a];
      }
    }
    if (total > 0.0) {
      for (double& x : q) x /= total;
    }
    out.action_values[info.key] = q;
    out.external_reach[info.key] = total;
  }
  return out;
}


inline BasicTrainBatch<double> RandomBatch(const std::vector<int>& dims, int rows,
                                    Rng& rng, bool masked) {
  BasicTrainBatch<double> b;
  b.Resize(rows, dims.front(), dims.back());
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < dims.front(); ++j) b.features(r, j) = rng.Uniform() * 2 - 1;
    for (int j = 0; j < dims.back(); ++j) {
      b.targets(r, j) = rng.Uniform() * 4 - 2;
      b.mask(r, j) = masked && rng.Uniform() < 0.3 ? 0.0 : 1.0;
    }
    b.mask(r, 0) = 1.0;
    b.weights(r) = 0.1 + rng.Uniform() * 5;
  }
  return b;
}

// Largest relative difference between analytic and central-difference
// gradients, measured as ||analytic - numeric|| / max(||analytic||, ||numeric||).
inline double GradientCheck(const BasicMlpParams<double>& params,
                     const BasicTrainBatch<double>& batch, OutputHead head) {
  BasicMlpParams<double> grads;
  LossAndGrads(params, batch, head, &grads);
  const double h = 1e-4;
  double diff_sq = 0, a_sq = 0, n_sq = 0;
  BasicMlpParams<double> probe = params;
  auto check = [&](double& slot, double analytic) {
    const double saved = slot;
    slot = saved + h;
    const double up = LossAndGrads<double>(probe, batch, head, nullptr);
    slot = saved - h;
    const double down = LossAndGrads<double>(probe, batch, head, nullptr);
    slot = saved;
    const double numeric = (up - down) / (2 * h);
    diff_sq += (analytic - numeric) * (analytic - numeric);
    a_sq += analytic * analytic;
    n_sq += numeric * numeric;
  };
  for (int k = 0; k < probe.num_layers(); ++k) {
    for (Eigen::Index i = 0; i < probe.weights[k].size(); ++i) {
      check(probe.weights[k].data()[i], grads.weights[k].data()[i]);
    }
    for (Eigen::Index i = 0; i < probe.biases[k].size(); ++i) {
      check(probe.biases[k].data()[i], grads.biases[k].data()[i]);
    }
  }
  const double scale = std::max(std::sqrt(a_sq), std::sqrt(n_sq));
  return scale == 0 ? 0.0 : std::sqrt(diff_sq) / scale;
}

// Smallest |pre-activation| over all hidden units and rows.
inline double MinHiddenMargin(const BasicMlpParams<double>& params,
                              const BasicMlpParams<double>::Matrix& x) {
  double margin = 1e300;
  BasicMlpParams<double>::Matrix a = x;
  for (int k = 0; k + 1 < params.num_layers(); ++k) {
    BasicMlpParams<double>::Matrix z = a * params.weights[k].transpose();
    z.rowwise() += params.biases[k].transpose();
    margin = std::min(margin, z.cwiseAbs().minCoeff());
    a = z.cwiseMax(0.0);
  }
  return margin;
}

// Upper-tail probability of a chi-square statistic.
inline double ChiSquarePValue(double statistic, double dof) {
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

// Chi-square goodness of fit of reservoir retention counts: `trials`
// independent reservoirs of `capacity` fed items 0..n-1; every item should
// be retained with probability capacity / n.
struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
};

inline ChiSquareResult ReservoirChiSquare(int trials, int capacity, int n,
                                          uint64_t seed) {
  std::vector<int64_t> kept(n, 0);
  for (int t = 0; t < trials; ++t) {
    Rng rng(MixSeed(seed, t));
    ReservoirBuffer<int> buffer(capacity);
    for (int i = 0; i < n; ++i) buffer.Add(i, rng);
    for (int item : buffer.items()) ++kept[item];
  }
  const double expected = static_cast<double>(trials) * capacity / n;
  ChiSquareResult r;
  for (int64_t k : kept) r.statistic += (k - expected) * (k - expected) / expected;
  r.dof = n - 1;
  r.p_value = ChiSquarePValue(r.statistic, r.dof);
  return r;
}

}  // namespace dreamcfr::testing

#endif  // DREAMCFR_TESTS_TEST_UTIL_H_
