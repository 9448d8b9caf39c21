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

#include "dreamcfr/game.h"

#include <algorithm>
#include <bit>
#include <sstream>

#include "dreamcfr/errors.h"

namespace dreamcfr {
namespace {

constexpr GameRules kKuhnRules = {
    .id = GameId::kKuhn,
    .deck_size = 3,
    .num_ranks = 3,
    .num_suits = 1,
    .hole_cards = 1,
    .board_cards = 0,
    .num_rounds = 1,
    .initial_contribution = {100, 100},
    .raise_size = {100, 0},
    .raise_cap = 1,
    .first_actor = {0, 0},
    .big_blind = 100,
    .max_actions_per_round = 3,
    .max_contribution = 200,
};

constexpr GameRules kLeducRules = {
    .id = GameId::kLeduc,
    .deck_size = 6,
    .num_ranks = 3,
    .num_suits = 2,
    .hole_cards = 1,
    .board_cards = 1,
    .num_rounds = 2,
    .initial_contribution = {50, 50},
    .raise_size = {100, 200},
    .raise_cap = 2,
    // The second-round opener is not pinned down by the rules; the
    // first-round opener is kept.
    .first_actor = {0, 0},
    .big_blind = 100,
    .max_actions_per_round = 4,
    .max_contribution = 50 + 2 * 100 + 2 * 200,
};

constexpr GameRules kFhpRules = {
    .id = GameId::kFhp,
    .deck_size = 52,
    .num_ranks = 13,
    .num_suits = 4,
    .hole_cards = 2,
    .board_cards = 3,
    .num_rounds = 2,
    .initial_contribution = {50, 100},
    .raise_size = {100, 100},
    .raise_cap = 3,
    .first_actor = {0, 1},
    .big_blind = 100,
    .max_actions_per_round = 5,
    .max_contribution = 100 + 3 * 100 + 3 * 100,
};

int64_t Choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// k-th m-subset of [0, n) in lexicographic order.
std::vector<int> UnrankCombination(int n, int m, int64_t k) {
  std::vector<int> out;
  int start = 0;
  for (int pos = 0; pos < m; ++pos) {
    for (int c = start; c < n; ++c) {
      const int64_t count = Choose(n - c - 1, m - pos - 1);
      if (k < count) {
        out.push_back(c);
        start = c + 1;
        break;
      }
      k -= count;
    }
  }
  return out;
}

uint32_t PackCards(std::span<const int> cards) {
  uint32_t id = 0;
  for (size_t k = 0; k < cards.size(); ++k) {
    id |= static_cast<uint32_t>(cards[k] + 1) << (6 * k);
  }
  return id;
}

int UnpackCard(uint32_t id, int slot) {
  return static_cast<int>((id >> (6 * slot)) & 63u) - 1;
}

uint64_t UsedMask(const GameState::Parts& p) {
  uint64_t used = 0;
  for (const auto& hole : p.holes) {
    for (int8_t c : hole) {
      if (c >= 0) used |= uint64_t{1} << c;
    }
  }
  for (int8_t c : p.board) {
    if (c >= 0) used |= uint64_t{1} << c;
  }
  return used;
}

std::vector<int> RemainingDeck(const GameState& state) {
  const uint64_t used = UsedMask(state.parts());
  std::vector<int> deck;
  for (int c = 0; c < state.rules().deck_size; ++c) {
    if (!(used & (uint64_t{1} << c))) deck.push_back(c);
  }
  return deck;
}

bool HasPresetBoard(const GameState::Parts& p) { return p.preset_board[0] >= 0; }

void CheckConsistent(const GameState::Parts& p) {
  const GameRules& rules = RulesFor(p.game);
  auto fail = [](const std::string& why) {
    throw InvalidStateError("inconsistent game state: " + why);
  };
  if (p.round < 0 || p.round >= rules.num_rounds) fail("round out of range");
  if (p.raises < 0 || p.raises > rules.raise_cap) fail("raise cap exceeded");
  for (int k = 0; k < 2; ++k) {
    if (p.contribution[k] < rules.initial_contribution[k]) {
      fail("contribution below forced bet");
    }
    if (p.contribution[k] > rules.max_contribution) {
      fail("contribution above betting limit");
    }
  }
  const bool dealt = p.phase != Phase::kDealHoles;
  for (const auto& hole : p.holes) {
    for (int k = 0; k < 2; ++k) {
      const bool expect = dealt && k < rules.hole_cards;
      if ((hole[k] >= 0) != expect) fail("private cards do not match phase");
      if (hole[k] >= rules.deck_size) fail("card out of range");
    }
  }
  int board_count = 0;
  for (int8_t c : p.board) {
    if (c >= rules.deck_size) fail("card out of range");
    if (c >= 0) ++board_count;
  }
  const int expect_board = p.round >= 1 ? rules.board_cards : 0;
  if (board_count != expect_board) fail("board does not match round");
  int num_cards = board_count;
  for (const auto& hole : p.holes) {
    for (int8_t c : hole) num_cards += c >= 0;
  }
  if (std::popcount(UsedMask(p)) != num_cards) fail("duplicate cards");
  if (p.phase == Phase::kBetting && (p.to_act < 0 || p.to_act > 1)) {
    fail("no valid actor");
  }
  if (p.phase == Phase::kFolded && (p.folder < 0 || p.folder > 1)) {
    fail("fold without folder");
  }
  if (p.phase == Phase::kShowdown && p.contribution[0] != p.contribution[1]) {
    fail("showdown with unequal pot contributions");
  }
  const auto implied = ContributionsAfter(
      p.game, p.actions,
      p.round == 0 ? static_cast<int>(p.actions.size()) : p.round_start);
  if (implied != p.contribution) fail("pot does not match action history");
}

}  // namespace

GameId ParseGameId(std::string_view name) {
  if (name == "kuhn") return GameId::kKuhn;
  if (name == "leduc") return GameId::kLeduc;
  if (name == "fhp") return GameId::kFhp;
  throw InvalidInputError("unknown game id: " + std::string(name));
}

const char* GameName(GameId game) {
  switch (game) {
    case GameId::kKuhn:
      return "kuhn";
    case GameId::kLeduc:
      return "leduc";
    case GameId::kFhp:
      return "fhp";
  }
  return "?";
}

const char* ActionName(ActionType action) {
  switch (action) {
    case ActionType::kFold:
      return "f";
    case ActionType::kCall:
      return "c";
    case ActionType::kRaise:
      return "r";
  }
  return "?";
}

const GameRules& RulesFor(GameId game) {
  switch (game) {
    case GameId::kKuhn:
      return kKuhnRules;
    case GameId::kLeduc:
      return kLeducRules;
    case GameId::kFhp:
      return kFhpRules;
  }
  throw InvalidInputError("unknown game");
}

Card CardAt(GameId game, int index) {
  const GameRules& rules = RulesFor(game);
  if (index < 0 || index >= rules.deck_size) {
    throw InvalidInputError("card index out of range");
  }
  return Card{static_cast<int8_t>(index / rules.num_suits),
              static_cast<int8_t>(index % rules.num_suits)};
}

int CardIndex(GameId game, Card card) {
  const GameRules& rules = RulesFor(game);
  if (card.rank < 0 || card.rank >= rules.num_ranks || card.suit < 0 ||
      card.suit >= rules.num_suits) {
    throw InvalidInputError("card out of range for game");
  }
  return card.rank * rules.num_suits + card.suit;
}

std::string CardName(GameId game, int index) {
  if (index < 0) return "?";
  const Card c = CardAt(game, index);
  if (game == GameId::kFhp) return StandardCardName(c);
  std::string name(1, "JQK"[c.rank]);
  if (game == GameId::kLeduc) name += "ab"[c.suit];
  return name;
}

std::array<int, 2> ContributionsAfter(GameId game,
                                      std::span<const ActionType> actions,
                                      int round0_length) {
  const GameRules& rules = RulesFor(game);
  std::array<int, 2> c = rules.initial_contribution;
  int round = 0;
  int actor = rules.first_actor[0];
  for (size_t k = 0; k < actions.size(); ++k) {
    if (round == 0 && static_cast<int>(k) == round0_length) {
      round = 1;
      actor = rules.first_actor[1];
    }
    const int opp = 1 - actor;
    if (actions[k] == ActionType::kCall) {
      c[actor] = c[opp];
    } else if (actions[k] == ActionType::kRaise) {
      c[actor] = c[opp] + rules.raise_size[round];
    }
    actor = opp;
  }
  return c;
}

GameState GameState::Initial(GameId game) {
  Parts p;
  p.game = game;
  p.phase = Phase::kDealHoles;
  p.contribution = RulesFor(game).initial_contribution;
  return GameState(std::move(p));
}

GameState GameState::FixedDeal(GameId game, std::span<const int> hole_p0,
                               std::span<const int> hole_p1,
                               std::span<const int> board) {
  const GameRules& rules = RulesFor(game);
  if (static_cast<int>(hole_p0.size()) != rules.hole_cards ||
      static_cast<int>(hole_p1.size()) != rules.hole_cards) {
    throw InvalidInputError("wrong number of private cards");
  }
  if (!board.empty() && static_cast<int>(board.size()) != rules.board_cards) {
    throw InvalidInputError("wrong number of board cards");
  }
  std::vector<int> cards(hole_p0.begin(), hole_p0.end());
  cards.insert(cards.end(), hole_p1.begin(), hole_p1.end());
  cards.insert(cards.end(), board.begin(), board.end());
  uint64_t used = 0;
  for (int c : cards) {
    if (c < 0 || c >= rules.deck_size) throw InvalidInputError("bad card");
    if (used & (uint64_t{1} << c)) throw InvalidInputError("duplicate card");
    used |= uint64_t{1} << c;
  }
  Parts p;
  p.game = game;
  p.phase = Phase::kBetting;
  p.to_act = static_cast<int8_t>(rules.first_actor[0]);
  p.contribution = rules.initial_contribution;
  for (int k = 0; k < rules.hole_cards; ++k) {
    p.holes[0][k] = static_cast<int8_t>(hole_p0[k]);
    p.holes[1][k] = static_cast<int8_t>(hole_p1[k]);
  }
  for (size_t k = 0; k < board.size(); ++k) {
    p.preset_board[k] = static_cast<int8_t>(board[k]);
  }
  return GameState(std::move(p));
}

int GameState::board_count() const {
  int n = 0;
  for (int8_t c : p_.board) n += c >= 0;
  return n;
}

int GameState::round0_length() const {
  return p_.round == 0 ? static_cast<int>(p_.actions.size()) : p_.round_start;
}

int GameState::actor() const {
  switch (p_.phase) {
    case Phase::kDealHoles:
    case Phase::kDealBoard:
      return kChancePlayer;
    case Phase::kBetting:
      return p_.to_act;
    default:
      return kTerminalPlayer;
  }
}

std::string GameState::ToString() const {
  std::ostringstream out;
  out << GameName(p_.game) << " r" << int{p_.round} << " [";
  for (int p = 0; p < 2; ++p) {
    if (p) out << " ";
    for (int k = 0; k < rules().hole_cards; ++k) {
      out << CardName(p_.game, p_.holes[p][k]);
    }
  }
  out << "] board=";
  for (int k = 0; k < board_count(); ++k) out << CardName(p_.game, p_.board[k]);
  out << " actions=";
  for (size_t k = 0; k < p_.actions.size(); ++k) {
    if (p_.round >= 1 && static_cast<int>(k) == p_.round_start) out << "/";
    out << ActionName(p_.actions[k]);
  }
  out << " pot=" << p_.contribution[0] << "," << p_.contribution[1];
  return out.str();
}

NodeInfo NodeKindOf(const GameState& state) {
  CheckConsistent(state.parts());
  switch (state.phase()) {
    case Phase::kDealHoles:
    case Phase::kDealBoard:
      return {NodeKind::kChance, -1};
    case Phase::kBetting:
      return {NodeKind::kDecision, state.actor()};
    default:
      return {NodeKind::kTerminal, -1};
  }
}

std::vector<ActionType> LegalActions(const GameState& state) {
  if (state.phase() != Phase::kBetting) {
    throw WrongNodeError("legal actions requested at a non-decision node");
  }
  const int actor = state.actor();
  std::vector<ActionType> legal;
  legal.reserve(3);
  if (state.contribution(1 - actor) > state.contribution(actor)) {
    legal.push_back(ActionType::kFold);
  }
  legal.push_back(ActionType::kCall);
  if (state.raises_this_round() < state.rules().raise_cap) {
    legal.push_back(ActionType::kRaise);
  }
  return legal;
}

int64_t NumChanceOutcomes(const GameState& state) {
  const GameRules& rules = state.rules();
  if (state.phase() == Phase::kDealHoles) {
    const int d = rules.deck_size;
    if (rules.hole_cards == 1) return static_cast<int64_t>(d) * (d - 1);
    return Choose(d, 2) * Choose(d - 2, 2);
  }
  if (state.phase() == Phase::kDealBoard) {
    if (HasPresetBoard(state.parts())) return 1;
    return Choose(rules.deck_size - 2 * rules.hole_cards, rules.board_cards);
  }
  throw WrongNodeError("chance outcomes requested at a non-chance node");
}

ChanceOutcome ChanceOutcomeAt(const GameState& state, int64_t index) {
  const int64_t n = NumChanceOutcomes(state);
  if (index < 0 || index >= n) throw InvalidInputError("outcome out of range");
  const GameRules& rules = state.rules();
  const double prob = 1.0 / static_cast<double>(n);
  if (state.phase() == Phase::kDealHoles) {
    const int d = rules.deck_size;
    if (rules.hole_cards == 1) {
      const int first = static_cast<int>(index / (d - 1));
      int second = static_cast<int>(index % (d - 1));
      if (second >= first) ++second;
      const std::array<int, 4> cards = {first, -1, second, -1};
      return {PackCards(cards), prob};
    }
    const int64_t per_first = Choose(d - 2, 2);
    const std::vector<int> a = UnrankCombination(d, 2, index / per_first);
    std::vector<int> rest;
    for (int c = 0; c < d; ++c) {
      if (c != a[0] && c != a[1]) rest.push_back(c);
    }
    const std::vector<int> b = UnrankCombination(d - 2, 2, index % per_first);
    const std::array<int, 4> cards = {a[0], a[1], rest[b[0]], rest[b[1]]};
    return {PackCards(cards), prob};
  }
  const auto& preset = state.parts().preset_board;
  if (HasPresetBoard(state.parts())) {
    std::vector<int> cards(preset.begin(), preset.begin() + rules.board_cards);
    return {PackCards(cards), 1.0};
  }
  const std::vector<int> deck = RemainingDeck(state);
  const std::vector<int> pick = UnrankCombination(
      static_cast<int>(deck.size()), rules.board_cards, index);
  std::vector<int> cards;
  for (int k : pick) cards.push_back(deck[k]);
  return {PackCards(cards), prob};
}

std::vector<ChanceOutcome> ChanceOutcomes(const GameState& state) {
  const int64_t n = NumChanceOutcomes(state);
  std::vector<ChanceOutcome> out;
  out.reserve(static_cast<size_t>(n));
  for (int64_t k = 0; k < n; ++k) out.push_back(ChanceOutcomeAt(state, k));
  return out;
}

GameState SampleChance(const GameState& state, Sampler& sampler) {
  const int64_t n = NumChanceOutcomes(state);
  return Apply(state, ChanceOutcomeAt(state, sampler.SampleUniform(n)));
}

GameState Apply(const GameState& state, ActionType action) {
  if (state.phase() != Phase::kBetting) {
    throw WrongNodeError("player action applied at a non-decision node");
  }
  const std::vector<ActionType> legal = LegalActions(state);
  if (std::find(legal.begin(), legal.end(), action) == legal.end()) {
    throw IllegalActionError(std::string("illegal action ") +
                             ActionName(action) + " at " + state.ToString());
  }
  const GameRules& rules = state.rules();
  GameState::Parts p = state.parts();
  const int actor = p.to_act;
  const int opp = 1 - actor;
  p.actions.push_back(action);
  switch (action) {
    case ActionType::kFold:
      p.folder = static_cast<int8_t>(actor);
      p.phase = Phase::kFolded;
      return GameState(std::move(p));
    case ActionType::kCall:
      p.contribution[actor] = p.contribution[opp];
      ++p.actions_in_round;
      if (p.actions_in_round >= 2) {
        p.phase = p.round + 1 < rules.num_rounds ? Phase::kDealBoard
                                                 : Phase::kShowdown;
        return GameState(std::move(p));
      }
      break;
    case ActionType::kRaise:
      p.contribution[actor] = p.contribution[opp] + rules.raise_size[p.round];
      ++p.raises;
      ++p.actions_in_round;
      break;
  }
  p.to_act = static_cast<int8_t>(opp);
  return GameState(std::move(p));
}

GameState Apply(const GameState& state, const ChanceOutcome& outcome) {
  const GameRules& rules = state.rules();
  GameState::Parts p = state.parts();
  uint64_t used = UsedMask(p);
  auto take = [&](int card) {
    if (card < 0 || card >= rules.deck_size) {
      throw IllegalActionError("chance outcome names an invalid card");
    }
    if (used & (uint64_t{1} << card)) {
      throw IllegalActionError("chance outcome deals a card twice");
    }
    used |= uint64_t{1} << card;
    return static_cast<int8_t>(card);
  };
  if (state.phase() == Phase::kDealHoles) {
    for (int player = 0; player < 2; ++player) {
      for (int k = 0; k < rules.hole_cards; ++k) {
        p.holes[player][k] = take(UnpackCard(outcome.id, 2 * player + k));
      }
    }
    p.phase = Phase::kBetting;
    p.to_act = static_cast<int8_t>(rules.first_actor[0]);
    return GameState(std::move(p));
  }
  if (state.phase() == Phase::kDealBoard) {
    for (int k = 0; k < rules.board_cards; ++k) {
      const int card = UnpackCard(outcome.id, k);
      if (HasPresetBoard(p) && card != p.preset_board[k]) {
        throw IllegalActionError("outcome contradicts the fixed board");
      }
      p.board[k] = take(card);
    }
    p.phase = Phase::kBetting;
    p.round = static_cast<int8_t>(p.round + 1);
    p.to_act = static_cast<int8_t>(rules.first_actor[p.round]);
    p.raises = 0;
    p.actions_in_round = 0;
    p.round_start = static_cast<uint8_t>(p.actions.size());
    return GameState(std::move(p));
  }
  throw WrongNodeError("chance outcome applied at a non-chance node");
}

double TerminalReward(const GameState& state, int agent) {
  if (!state.IsTerminal()) {
    throw WrongNodeError("terminal reward requested at a non-terminal node");
  }
  const auto& p = state.parts();
  if (p.phase == Phase::kFolded) {
    const int folder = p.folder;
    const double lost = p.contribution[folder];
    return agent == folder ? -lost : lost;
  }
  int winner = -1;  // -1 = split pot
  switch (p.game) {
    case GameId::kKuhn:
      winner = p.holes[0][0] > p.holes[1][0] ? 0 : 1;
      break;
    case GameId::kLeduc: {
      const Card board = CardAt(p.game, p.board[0]);
      const Card c0 = CardAt(p.game, p.holes[0][0]);
      const Card c1 = CardAt(p.game, p.holes[1][0]);
      if (c0.rank == board.rank) {
        winner = 0;
      } else if (c1.rank == board.rank) {
        winner = 1;
      } else if (c0.rank != c1.rank) {
        winner = c0.rank > c1.rank ? 0 : 1;
      }
      break;
    }
    case GameId::kFhp: {
      std::array<Card, 3> board;
      for (int k = 0; k < 3; ++k) board[k] = CardAt(p.game, p.board[k]);
      std::array<uint32_t, 2> rank;
      for (int player = 0; player < 2; ++player) {
        const std::array<Card, 2> hole = {CardAt(p.game, p.holes[player][0]),
                                          CardAt(p.game, p.holes[player][1])};
        rank[player] = FhpShowdownRank(hole, board);
      }
      if (rank[0] != rank[1]) winner = rank[0] > rank[1] ? 0 : 1;
      break;
    }
  }
  if (winner < 0) return 0.0;
  const double won = p.contribution[1 - winner];
  return agent == winner ? won : -won;
}

}  // namespace dreamcfr
