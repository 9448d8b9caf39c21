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

#include "dreamcfr/mc_sampling.h"

#include <cmath>

#include "dreamcfr/errors.h"

namespace dreamcfr {
namespace {

std::vector<double> PolicyAt(const PolicySource& policy,
                             const InfostateKey& key,
                             std::span<const ActionType> legal) {
  std::vector<double> pi = policy.ActionProbabilities(key, legal);
  if (pi.size() != legal.size()) {
    throw InvalidInputError("policy size mismatch at " + key.ToString());
  }
  return pi;
}

class OsWalker {
 public:
  OsWalker(int traverser, const PolicySource& policy, double epsilon,
           const BaselineSource& baseline, Sampler& sampler,
           TrajectoryRecord& record)
      : traverser_(traverser),
        policy_(policy),
        epsilon_(epsilon),
        baseline_(baseline),
        sampler_(sampler),
        record_(record) {}

  double Walk(const GameState& s, double reach) {
    ++record_.nodes_touched;
    const NodeInfo info = NodeKindOf(s);
    if (info.kind == NodeKind::kTerminal) {
      record_.terminal = s;
      record_.terminal_reward = TerminalReward(s, traverser_);
      return record_.terminal_reward;
    }
    if (info.kind == NodeKind::kChance) {
      return Walk(SampleChance(s, sampler_), reach);
    }
    const int actor = info.agent;
    TrajectoryStep step;
    step.state = s;
    step.actor = actor;
    step.legal = LegalActions(s);
    step.key = InfostateKeyOf(s, actor);
    step.policy = PolicyAt(policy_, step.key, step.legal);
    step.sampling = SamplingPolicy(step.policy, epsilon_, actor == traverser_);
    step.action = sampler_.SampleIndex(step.sampling);
    step.sample_prob = step.sampling[step.action];
    if (!(step.sample_prob > 0.0)) {
      throw SamplingError("sampled an action with zero probability at " +
                          step.key.ToString());
    }
    step.traverser_reach_before = reach;
    step.traverser_reach_after =
        actor == traverser_ ? reach * step.sample_prob : reach;
    step.baseline.assign(step.legal.size(), 0.0);
    baseline_.Values(s, step.legal, traverser_, step.baseline);
    const GameState next = Apply(s, step.legal[step.action]);
    const double after = step.traverser_reach_after;

    const size_t index = record_.steps.size();
    record_.steps.push_back(std::move(step));
    const double child = Walk(next, after);

    TrajectoryStep& st = record_.steps[index];
    st.child_value = child;
    st.action_values = st.baseline;
    const int a = st.action;
    st.action_values[a] =
        st.baseline[a] + (child - st.baseline[a]) / st.sample_prob;
    double v = 0.0;
    for (size_t k = 0; k < st.policy.size(); ++k) {
      v += st.policy[k] * st.action_values[k];
    }
    st.value = v;
    return v;
  }

 private:
  int traverser_;
  const PolicySource& policy_;
  double epsilon_;
  const BaselineSource& baseline_;
  Sampler& sampler_;
  TrajectoryRecord& record_;
};

class EsWalker {
 public:
  EsWalker(int traverser, const PolicySource& policy, Sampler& sampler,
           EsResult& result)
      : traverser_(traverser),
        policy_(policy),
        sampler_(sampler),
        result_(result) {}

  double Walk(const GameState& s) {
    ++result_.nodes_touched;
    const NodeInfo info = NodeKindOf(s);
    if (info.kind == NodeKind::kTerminal) return TerminalReward(s, traverser_);
    if (info.kind == NodeKind::kChance) return Walk(SampleChance(s, sampler_));
    const std::vector<ActionType> legal = LegalActions(s);
    InfostateKey key = InfostateKeyOf(s, info.agent);
    std::vector<double> pi = PolicyAt(policy_, key, legal);
    if (info.agent != traverser_) {
      const int a = sampler_.SampleIndex(pi);
      if (!(pi[a] > 0.0)) {
        throw SamplingError("sampled an action with zero probability at " +
                            key.ToString());
      }
      return Walk(Apply(s, legal[a]));
    }
    EsVisit visit;
    visit.action_values.resize(legal.size());
    double v = 0.0;
    for (size_t a = 0; a < legal.size(); ++a) {
      visit.action_values[a] = Walk(Apply(s, legal[a]));
      v += pi[a] * visit.action_values[a];
    }
    visit.state = s;
    visit.key = std::move(key);
    visit.legal = legal;
    visit.policy = std::move(pi);
    visit.value = v;
    result_.visits.push_back(std::move(visit));
    return v;
  }

 private:
  int traverser_;
  const PolicySource& policy_;
  Sampler& sampler_;
  EsResult& result_;
};

}  // namespace

std::vector<double> SamplingPolicy(std::span<const double> pi, double epsilon,
                                   bool is_traverser) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidInputError("epsilon must lie in [0, 1]");
  }
  std::vector<double> xi(pi.begin(), pi.end());
  if (!is_traverser) return xi;
  const double u = 1.0 / pi.size();
  for (double& x : xi) x = epsilon * u + (1.0 - epsilon) * x;
  return xi;
}

void BaselineTable::Update(const InfostateKey& joint_key, int action,
                           double observed, int traverser) {
  if (!std::isfinite(observed)) {
    throw InvalidInputError("non-finite baseline observation");
  }
  Entry& e = table_[{joint_key, action}];
  const double v = traverser == 0 ? observed : -observed;
  ++e.count;
  e.mean += (v - e.mean) / static_cast<double>(e.count);
}

BaselineTable::Entry BaselineTable::Get(const InfostateKey& joint_key,
                                        int action) const {
  auto it = table_.find({joint_key, action});
  return it == table_.end() ? Entry{} : it->second;
}

void BaselineTable::Values(const GameState& state,
                           std::span<const ActionType> legal, int traverser,
                           std::span<double> out) const {
  const InfostateKey key = JointKeyOf(state);
  const double sign = traverser == 0 ? 1.0 : -1.0;
  for (size_t a = 0; a < legal.size(); ++a) {
    out[a] = sign * Get(key, static_cast<int>(a)).mean;
  }
}

TrajectoryRecord OsTraverse(const GameState& root, int traverser,
                            const PolicySource& policy, double epsilon,
                            const BaselineSource& baseline, Sampler& sampler) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidInputError("epsilon must lie in [0, 1]");
  }
  TrajectoryRecord record;
  record.traverser = traverser;
  OsWalker walker(traverser, policy, epsilon, baseline, sampler, record);
  record.root_value = walker.Walk(root, 1.0);
  return record;
}

void UpdateBaselines(BaselineTable& table, const TrajectoryRecord& record) {
  for (const TrajectoryStep& step : record.steps) {
    table.Update(JointKeyOf(step.state), step.action, step.child_value,
                 record.traverser);
  }
}

EsResult EsTraverse(const GameState& root, int traverser,
                    const PolicySource& policy, Sampler& sampler) {
  EsResult result;
  EsWalker walker(traverser, policy, sampler, result);
  result.root_value = walker.Walk(root);
  return result;
}

double ExactValue(const GameState& state, int traverser,
                  const PolicySource& policy) {
  const NodeInfo info = NodeKindOf(state);
  if (info.kind == NodeKind::kTerminal) return TerminalReward(state, traverser);
  if (info.kind == NodeKind::kChance) {
    double v = 0.0;
    for (const ChanceOutcome& o : ChanceOutcomes(state)) {
      v += o.probability * ExactValue(Apply(state, o), traverser, policy);
    }
    return v;
  }
  const std::vector<double> q = ExactActionValues(state, traverser, policy);
  const std::vector<double> pi = PolicyAt(
      policy, InfostateKeyOf(state, info.agent), LegalActions(state));
  double v = 0.0;
  for (size_t a = 0; a < q.size(); ++a) v += pi[a] * q[a];
  return v;
}

std::vector<double> ExactActionValues(const GameState& state, int traverser,
                                      const PolicySource& policy) {
  const std::vector<ActionType> legal = LegalActions(state);
  std::vector<double> q(legal.size());
  for (size_t a = 0; a < legal.size(); ++a) {
    q[a] = ExactValue(Apply(state, legal[a]), traverser, policy);
  }
  return q;
}

void OracleBaseline::Values(const GameState& state,
                            std::span<const ActionType> legal, int traverser,
                            std::span<double> out) const {
  for (size_t a = 0; a < legal.size(); ++a) {
    out[a] = ExactValue(Apply(state, legal[a]), traverser, policy_);
  }
}

}  // namespace dreamcfr
