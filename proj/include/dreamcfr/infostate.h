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

#ifndef DREAMCFR_INFOSTATE_H_
#define DREAMCFR_INFOSTATE_H_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dreamcfr/game.h"

namespace dreamcfr {

// Agent id used for keys that observe every player's private cards.
inline constexpr int kJointAgent = 2;

// An agent's action-observation history. Two histories map to the same key
// exactly when the agent cannot tell them apart.
struct InfostateKey {
  GameId game = GameId::kKuhn;
  int8_t agent = 0;
  // Player 0's private cards in [0, 2), player 1's in [2, 4); -1 = unseen.
  std::array<int8_t, 4> holes{-1, -1, -1, -1};
  std::array<int8_t, 3> board{-1, -1, -1};
  uint8_t round0_length = 0;
  std::vector<ActionType> actions;

  auto operator<=>(const InfostateKey&) const = default;

  int round() const { return board[0] >= 0 ? 1 : 0; }
  std::string ToString() const;
};

struct InfostateKeyHash {
  size_t operator()(const InfostateKey& key) const;
};

InfostateKey InfostateKeyOf(const GameState& state, int agent);
// Key observing both players' cards, i.e. s*(h). In the supported games this
// identifies the history uniquely.
InfostateKey JointKeyOf(const GameState& state);

// Layout: own private cards (one-hot over the deck), board cards (one-hot,
// omitted for games without a board), per-round action block
// (positions x {fold, call, raise}), then both pot contributions divided by
// the betting limit.
int EncodingSize(GameId game);
// EncodeInfostate of player 0's key followed by player 1's private block.
int JointEncodingSize(GameId game);

std::vector<float> EncodeInfostate(const InfostateKey& key);
void EncodeInfostateInto(const InfostateKey& key, std::span<float> out);
std::vector<float> EncodeJointInfostate(const GameState& state);
void EncodeJointInfostateInto(const GameState& state, std::span<float> out);

// Any state consistent with the key (unseen cards filled with the lowest
// unused cards). Only the key's owner's view of it is meaningful.
GameState RepresentativeState(const InfostateKey& key);

// Legal actions at the key's decision point.
std::vector<ActionType> LegalActionsAt(const InfostateKey& key);

// The key owner's earlier decision points on the path to `key`, in order,
// each with the action the owner took there.
struct OwnDecision {
  InfostateKey key;
  std::vector<ActionType> legal;
  int action_index;
};
std::vector<OwnDecision> OwnDecisionPrefix(const InfostateKey& key);

}  // namespace dreamcfr

#endif  // DREAMCFR_INFOSTATE_H_
