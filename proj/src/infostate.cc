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

#include "dreamcfr/infostate.h"

#include <algorithm>
#include <sstream>

#include "dreamcfr/errors.h"

namespace dreamcfr {
namespace {

int BoardBlockSize(const GameRules& rules) {
  return rules.board_cards > 0 ? rules.deck_size : 0;
}

int BetBlockSize(const GameRules& rules) {
  return rules.num_rounds * rules.max_actions_per_round * kNumActionTypes;
}

InfostateKey KeyWithCards(const GameState& state, int agent) {
  InfostateKey key;
  key.game = state.game();
  key.agent = static_cast<int8_t>(agent);
  for (int player = 0; player < 2; ++player) {
    if (agent != kJointAgent && agent != player) continue;
    for (int k = 0; k < 2; ++k) {
      key.holes[2 * player + k] = static_cast<int8_t>(state.hole(player, k));
    }
  }
  for (int k = 0; k < 3; ++k) key.board[k] = static_cast<int8_t>(state.board(k));
  key.round0_length = static_cast<uint8_t>(state.round0_length());
  key.actions = state.actions();
  return key;
}

}  // namespace

std::string InfostateKey::ToString() const {
  std::ostringstream out;
  out << GameName(game) << ":";
  if (agent == kJointAgent) {
    out << "*";
  } else {
    out << "P" << int{agent};
  }
  out << "|";
  for (int k = 0; k < 4; ++k) {
    if (holes[k] >= 0) out << CardName(game, holes[k]);
    if (k == 1) out << ",";
  }
  out << "|";
  for (int8_t c : board) {
    if (c >= 0) out << CardName(game, c);
  }
  out << "|";
  for (size_t k = 0; k < actions.size(); ++k) {
    if (k == round0_length) out << "/";
    out << ActionName(actions[k]);
  }
  return out.str();
}

size_t InfostateKeyHash::operator()(const InfostateKey& key) const {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<uint64_t>(key.game));
  mix(static_cast<uint64_t>(key.agent));
  for (int8_t c : key.holes) mix(static_cast<uint8_t>(c));
  for (int8_t c : key.board) mix(static_cast<uint8_t>(c));
  mix(key.round0_length);
  for (ActionType a : key.actions) mix(static_cast<uint64_t>(a) + 7);
  return static_cast<size_t>(h);
}

InfostateKey InfostateKeyOf(const GameState& state, int agent) {
  if (agent < 0 || agent > 1) throw InvalidInputError("agent must be 0 or 1");
  return KeyWithCards(state, agent);
}

InfostateKey JointKeyOf(const GameState& state) {
  return KeyWithCards(state, kJointAgent);
}

int EncodingSize(GameId game) {
  const GameRules& rules = RulesFor(game);
  return rules.deck_size + BoardBlockSize(rules) + BetBlockSize(rules) + 2;
}

int JointEncodingSize(GameId game) {
  return EncodingSize(game) + RulesFor(game).deck_size;
}

void EncodeInfostateInto(const InfostateKey& key, std::span<float> out) {
  const GameRules& rules = RulesFor(key.game);
  if (static_cast<int>(out.size()) < EncodingSize(key.game)) {
    throw InvalidInputError("encoding buffer too small");
  }
  std::fill(out.begin(), out.begin() + EncodingSize(key.game), 0.0f);
  const int owner = key.agent == kJointAgent ? 0 : key.agent;
  for (int k = 0; k < 2; ++k) {
    const int c = key.holes[2 * owner + k];
    if (c >= 0) out[c] = 1.0f;
  }
  int offset = rules.deck_size;
  if (rules.board_cards > 0) {
    for (int8_t c : key.board) {
      if (c >= 0) out[offset + c] = 1.0f;
    }
    offset += rules.deck_size;
  }
  int round = 0;
  int position = 0;
  for (size_t k = 0; k < key.actions.size(); ++k) {
    if (round == 0 && k == key.round0_length) {
      round = 1;
      position = 0;
    }
    if (position < rules.max_actions_per_round) {
      const int slot =
          (round * rules.max_actions_per_round + position) * kNumActionTypes +
          static_cast<int>(key.actions[k]);
      out[offset + slot] = 1.0f;
    }
    ++position;
  }
  offset += BetBlockSize(rules);
  const auto contribution =
      ContributionsAfter(key.game, key.actions, key.round0_length);
  for (int p = 0; p < 2; ++p) {
    out[offset + p] = static_cast<float>(contribution[p]) /
                      static_cast<float>(rules.max_contribution);
  }
}

std::vector<float> EncodeInfostate(const InfostateKey& key) {
  std::vector<float> out(EncodingSize(key.game));
  EncodeInfostateInto(key, out);
  return out;
}

void EncodeJointInfostateInto(const GameState& state, std::span<float> out) {
  const GameId game = state.game();
  if (static_cast<int>(out.size()) < JointEncodingSize(game)) {
    throw InvalidInputError("encoding buffer too small");
  }
  EncodeInfostateInto(KeyWithCards(state, 0), out);
  const int base = EncodingSize(game);
  std::fill(out.begin() + base, out.begin() + JointEncodingSize(game), 0.0f);
  for (int k = 0; k < 2; ++k) {
    const int c = state.hole(1, k);
    if (c >= 0) out[base + c] = 1.0f;
  }
}

std::vector<float> EncodeJointInfostate(const GameState& state) {
  std::vector<float> out(JointEncodingSize(state.game()));
  EncodeJointInfostateInto(state, out);
  return out;
}

GameState RepresentativeState(const InfostateKey& key) {
  const GameRules& rules = RulesFor(key.game);
  uint64_t used = 0;
  for (int8_t c : key.holes) {
    if (c >= 0) used |= uint64_t{1} << c;
  }
  for (int8_t c : key.board) {
    if (c >= 0) used |= uint64_t{1} << c;
  }
  auto fill = [&]() {
    for (int c = 0; c < rules.deck_size; ++c) {
      if (!(used & (uint64_t{1} << c))) {
        used |= uint64_t{1} << c;
        return c;
      }
    }
    throw InvalidInputError("deck exhausted");
  };
  std::array<std::vector<int>, 2> holes;
  for (int player = 0; player < 2; ++player) {
    for (int k = 0; k < rules.hole_cards; ++k) {
      const int c = key.holes[2 * player + k];
      holes[player].push_back(c >= 0 ? c : fill());
    }
  }
  std::vector<int> board;
  if (key.board[0] >= 0) {
    for (int k = 0; k < rules.board_cards; ++k) board.push_back(key.board[k]);
  }
  GameState state = GameState::FixedDeal(key.game, holes[0], holes[1], board);
  for (ActionType a : key.actions) {
    if (state.phase() == Phase::kDealBoard) {
      state = Apply(state, ChanceOutcomeAt(state, 0));
    }
    state = Apply(state, a);
  }
  if (state.phase() == Phase::kDealBoard && !board.empty()) {
    state = Apply(state, ChanceOutcomeAt(state, 0));
  }
  return state;
}

std::vector<ActionType> LegalActionsAt(const InfostateKey& key) {
  return LegalActions(RepresentativeState(key));
}

std::vector<OwnDecision> OwnDecisionPrefix(const InfostateKey& key) {
  if (key.agent == kJointAgent) {
    throw InvalidInputError("own-decision prefix needs a single-agent key");
  }
  const GameState full = RepresentativeState(key);
  std::array<std::vector<int>, 2> holes;
  for (int player = 0; player < 2; ++player) {
    for (int k = 0; k < full.rules().hole_cards; ++k) {
      holes[player].push_back(full.hole(player, k));
    }
  }
  std::vector<int> board;
  if (key.board[0] >= 0) {
    for (int k = 0; k < full.rules().board_cards; ++k) {
      board.push_back(key.board[k]);
    }
  }
  std::vector<OwnDecision> prefix;
  GameState state = GameState::FixedDeal(key.game, holes[0], holes[1], board);
  for (ActionType a : key.actions) {
    if (state.phase() == Phase::kDealBoard) {
      state = Apply(state, ChanceOutcomeAt(state, 0));
    }
    if (state.actor() == key.agent) {
      OwnDecision d;
      d.key = InfostateKeyOf(state, key.agent);
      d.legal = LegalActions(state);
      d.action_index = static_cast<int>(
          std::find(d.legal.begin(), d.legal.end(), a) - d.legal.begin());
      prefix.push_back(std::move(d));
    }
    state = Apply(state, a);
  }
  return prefix;
}

}  // namespace dreamcfr
