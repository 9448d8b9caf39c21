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

#include "dreamcfr/game_tree.h"

#include "dreamcfr/errors.h"

namespace dreamcfr {

GameTree GameTree::Build(GameId game) {
  return Build(GameState::Initial(game));
}

GameTree GameTree::Build(const GameState& root) {
  if (root.game() == GameId::kFhp) {
    throw FeasibilityError("flop hold'em is too large to enumerate");
  }
  GameTree tree;
  tree.game_ = root.game();
  tree.nodes_.emplace_back();
  tree.states_.push_back(root);
  tree.Expand(0, root, -1, 1.0, {{{-1, -1}, {-1, -1}}});
  return tree;
}

GameTree GameTree::FromSpec(const TreeSpec& spec) {
  GameTree tree;
  tree.nodes_.emplace_back();
  tree.ExpandSpec(0, spec, -1, 1.0, {{{-1, -1}, {-1, -1}}});
  return tree;
}

int GameTree::FindInfoset(const InfostateKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

int GameTree::InfosetFor(const InfostateKey& key, int player,
                         const std::vector<ActionType>& legal,
                         std::pair<int, int> parent) {
  auto [it, inserted] =
      index_.try_emplace(key, static_cast<int>(infosets_.size()));
  if (inserted) {
    TreeInfoset info;
    info.key = key;
    info.player = player;
    info.legal = legal;
    info.parent_infoset = parent.first;
    info.parent_action = parent.second;
    infosets_.push_back(std::move(info));
  } else {
    const TreeInfoset& info = infosets_[it->second];
    if (info.legal != legal || info.player != player ||
        info.parent_infoset != parent.first ||
        info.parent_action != parent.second) {
      throw InvalidStateError("infoset " + key.ToString() +
                              " is not consistent across its histories");
    }
  }
  return it->second;
}

// nodes_[index] is already allocated. Children are allocated as one
// contiguous block before any of them is expanded.
void GameTree::Expand(int index, const GameState& state, int parent,
                      double chance_prob, LastDecision last) {
  TreeNode node;
  node.parent = parent;
  node.chance_prob = chance_prob;
  const NodeInfo info = NodeKindOf(state);
  node.kind = info.kind;
  if (info.kind == NodeKind::kTerminal) {
    node.payoff0 = TerminalReward(state, 0);
    nodes_[index] = node;
    return;
  }
  std::vector<GameState> children;
  std::vector<double> probs;
  if (info.kind == NodeKind::kChance) {
    for (const ChanceOutcome& o : ChanceOutcomes(state)) {
      children.push_back(Apply(state, o));
      probs.push_back(o.probability);
    }
  } else {
    node.player = static_cast<int8_t>(info.agent);
    const std::vector<ActionType> legal = LegalActions(state);
    node.infoset = InfosetFor(InfostateKeyOf(state, info.agent), info.agent,
                              legal, last[info.agent]);
    infosets_[node.infoset].nodes.push_back(index);
    for (ActionType a : legal) {
      children.push_back(Apply(state, a));
      probs.push_back(1.0);
    }
  }
  node.first_child = static_cast<int>(nodes_.size());
  node.num_children = static_cast<int>(children.size());
  nodes_[index] = node;
  nodes_.resize(nodes_.size() + children.size());
  states_.insert(states_.end(), children.begin(), children.end());
  for (int k = 0; k < node.num_children; ++k) {
    LastDecision child_last = last;
    if (info.kind == NodeKind::kDecision) {
      child_last[info.agent] = {node.infoset, k};
    }
    // Copy: states_ may reallocate while the subtree is expanded.
    const GameState child = states_[node.first_child + k];
    Expand(node.first_child + k, child, index, probs[k], child_last);
  }
}

void GameTree::ExpandSpec(int index, const TreeSpec& spec, int parent,
                          double chance_prob, LastDecision last) {
  TreeNode node;
  node.parent = parent;
  node.chance_prob = chance_prob;
  node.kind = spec.kind;
  if (spec.kind == NodeKind::kTerminal) {
    node.payoff0 = spec.payoff0;
    nodes_[index] = node;
    return;
  }
  if (spec.kind == NodeKind::kChance) {
    if (spec.chance_probs.size() != spec.children.size()) {
      throw InvalidInputError("chance node needs one probability per child");
    }
  } else {
    if (spec.legal.size() != spec.children.size()) {
      throw InvalidInputError("decision node needs one child per action");
    }
    node.player = static_cast<int8_t>(spec.player);
    node.infoset = InfosetFor(spec.key, spec.player, spec.legal,
                              last[spec.player]);
    infosets_[node.infoset].nodes.push_back(index);
  }
  node.first_child = static_cast<int>(nodes_.size());
  node.num_children = static_cast<int>(spec.children.size());
  nodes_[index] = node;
  nodes_.resize(nodes_.size() + spec.children.size());
  for (int k = 0; k < node.num_children; ++k) {
    LastDecision child_last = last;
    double p = 1.0;
    if (spec.kind == NodeKind::kDecision) {
      child_last[spec.player] = {node.infoset, k};
    } else {
      p = spec.chance_probs[k];
    }
    ExpandSpec(node.first_child + k, spec.children[k], index, p, child_last);
  }
}

}  // namespace dreamcfr
