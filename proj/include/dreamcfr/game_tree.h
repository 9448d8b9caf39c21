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

#ifndef DREAMCFR_GAME_TREE_H_
#define DREAMCFR_GAME_TREE_H_

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dreamcfr/game.h"
#include "dreamcfr/infostate.h"

namespace dreamcfr {

struct TreeNode {
  NodeKind kind = NodeKind::kTerminal;
  int8_t player = -1;
  int32_t infoset = -1;
  int32_t parent = -1;
  int32_t first_child = -1;
  int32_t num_children = 0;
  // Probability of this node given its parent when the parent is chance.
  double chance_prob = 1.0;
  double payoff0 = 0.0;  // terminal payoff to player 0
};

struct TreeInfoset {
  InfostateKey key;
  int player = 0;
  std::vector<ActionType> legal;
  std::vector<int32_t> nodes;
  // The owner's previous decision point and the action taken there.
  int32_t parent_infoset = -1;
  int parent_action = -1;
};

// Hand-made tree description, used to embed matrix games and other small
// examples. Decision children follow the infoset's action order.
struct TreeSpec {
  NodeKind kind = NodeKind::kTerminal;
  int player = -1;
  InfostateKey key;                  // decision nodes
  std::vector<ActionType> legal;     // decision nodes
  std::vector<double> chance_probs;  // chance nodes
  double payoff0 = 0.0;              // terminal nodes
  std::vector<TreeSpec> children;
};

// Fully expanded two-player zero-sum game tree with children stored
// contiguously. Built for Kuhn and Leduc (and fixed-deal subgames of either).
class GameTree {
 public:
  // Throws FeasibilityError for flop hold'em.
  static GameTree Build(GameId game);
  static GameTree Build(const GameState& root);
  static GameTree FromSpec(const TreeSpec& spec);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<TreeInfoset>& infosets() const { return infosets_; }
  const TreeNode& node(int index) const { return nodes_[index]; }
  int root() const { return 0; }
  // Empty for trees built from a TreeSpec.
  bool has_states() const { return !states_.empty(); }
  const GameState& state(int node) const { return states_[node]; }
  std::optional<GameId> game() const { return game_; }

  int FindInfoset(const InfostateKey& key) const;

 private:
  using LastDecision = std::array<std::pair<int, int>, 2>;
  void Expand(int index, const GameState& state, int parent,
              double chance_prob, LastDecision last);
  void ExpandSpec(int index, const TreeSpec& spec, int parent,
                  double chance_prob, LastDecision last);
  int InfosetFor(const InfostateKey& key, int player,
                 const std::vector<ActionType>& legal,
                 std::pair<int, int> parent);

  std::optional<GameId> game_;
  std::vector<TreeNode> nodes_;
  std::vector<GameState> states_;
  std::vector<TreeInfoset> infosets_;
  std::unordered_map<InfostateKey, int, InfostateKeyHash> index_;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_GAME_TREE_H_
