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

#ifndef DREAMCFR_GAME_H_
#define DREAMCFR_GAME_H_

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dreamcfr/card.h"
#include "dreamcfr/random.h"

namespace dreamcfr {

enum class GameId : uint8_t { kKuhn = 0, kLeduc = 1, kFhp = 2 };

// "kuhn", "leduc", "fhp".
GameId ParseGameId(std::string_view name);
const char* GameName(GameId game);

enum class ActionType : uint8_t { kFold = 0, kCall = 1, kRaise = 2 };
inline constexpr int kNumActionTypes = 3;
const char* ActionName(ActionType action);

inline constexpr int kNumPlayers = 2;
inline constexpr int kChancePlayer = -1;
inline constexpr int kTerminalPlayer = -2;

// Fixed-limit rules. Chip amounts are absolute; Kuhn uses a 100-chip ante and
// a 100-chip bet so every game shares the 100-chip big-blind unit.
struct GameRules {
  GameId id;
  int deck_size;
  int num_ranks;
  int num_suits;
  int hole_cards;
  int board_cards;
  int num_rounds;
  std::array<int, 2> initial_contribution;
  std::array<int, 2> raise_size;  // per round
  int raise_cap;                  // raises allowed per round
  std::array<int, 2> first_actor;  // per round
  int big_blind;
  int max_actions_per_round;
  int max_contribution;
};

const GameRules& RulesFor(GameId game);

// Card index <-> card. Kuhn: index = rank. Leduc: rank * 2 + suit.
// Standard deck: rank * 4 + suit.
Card CardAt(GameId game, int index);
int CardIndex(GameId game, Card card);
std::string CardName(GameId game, int index);

enum class NodeKind : uint8_t { kDecision, kChance, kTerminal };

struct NodeInfo {
  NodeKind kind;
  int agent = -1;  // acting agent for decision nodes
  bool operator==(const NodeInfo&) const = default;
};

struct ChanceOutcome {
  uint32_t id;  // packed card indices, see ChanceOutcomeAt
  double probability;
};

enum class Phase : uint8_t {
  kDealHoles,
  kBetting,
  kDealBoard,
  kShowdown,
  kFolded,
};

// Exact world state. Immutable through the public API: every transition
// returns a new value.
class GameState {
 public:
  // Raw storage. Exposed for snapshots and for tests that need to build
  // inconsistent states; NodeKindOf validates it.
  struct Parts {
    GameId game = GameId::kKuhn;
    Phase phase = Phase::kDealHoles;
    int8_t round = 0;
    int8_t to_act = 0;
    int8_t raises = 0;
    int8_t actions_in_round = 0;
    int8_t folder = -1;
    uint8_t round_start = 0;
    std::array<int, 2> contribution{};
    std::array<std::array<int8_t, 2>, 2> holes{{{-1, -1}, {-1, -1}}};
    std::array<int8_t, 3> board{-1, -1, -1};
    std::array<int8_t, 3> preset_board{-1, -1, -1};
    std::vector<ActionType> actions;

    auto operator<=>(const Parts&) const = default;
  };

  GameState() = default;  // Kuhn before the deal
  static GameState Initial(GameId game);
  // State right after the private deal. A non-empty `board` forces the later
  // board deal to those cards (one outcome with probability 1).
  static GameState FixedDeal(GameId game, std::span<const int> hole_p0,
                             std::span<const int> hole_p1,
                             std::span<const int> board = {});
  static GameState FromParts(Parts parts) { return GameState(std::move(parts)); }

  GameId game() const { return p_.game; }
  const GameRules& rules() const { return RulesFor(p_.game); }
  Phase phase() const { return p_.phase; }
  int round() const { return p_.round; }
  int raises_this_round() const { return p_.raises; }
  int contribution(int player) const { return p_.contribution[player]; }
  int hole(int player, int k) const { return p_.holes[player][k]; }
  int board(int k) const { return p_.board[k]; }
  int board_count() const;
  const std::vector<ActionType>& actions() const { return p_.actions; }
  // Number of actions that belong to the first betting round.
  int round0_length() const;
  // Player to act, kChancePlayer or kTerminalPlayer.
  int actor() const;
  bool IsTerminal() const {
    return p_.phase == Phase::kShowdown || p_.phase == Phase::kFolded;
  }
  const Parts& parts() const { return p_; }

  std::string ToString() const;

  auto operator<=>(const GameState&) const = default;

 private:
  explicit GameState(Parts parts) : p_(std::move(parts)) {}
  friend GameState Apply(const GameState&, ActionType);
  friend GameState Apply(const GameState&, const ChanceOutcome&);

  Parts p_;
};

// Throws InvalidStateError when the state is internally inconsistent.
NodeInfo NodeKindOf(const GameState& state);

// Legal actions in Fold, Call, Raise order. Fold only when facing a bet.
// Throws WrongNodeError unless the state is a decision node.
std::vector<ActionType> LegalActions(const GameState& state);

// Chance outcomes are uniform over the remaining deck combinations.
int64_t NumChanceOutcomes(const GameState& state);
ChanceOutcome ChanceOutcomeAt(const GameState& state, int64_t index);
std::vector<ChanceOutcome> ChanceOutcomes(const GameState& state);
GameState SampleChance(const GameState& state, Sampler& sampler);

GameState Apply(const GameState& state, ActionType action);
GameState Apply(const GameState& state, const ChanceOutcome& outcome);

// Chips won (positive) or lost by `agent`. Throws WrongNodeError when the
// state is not terminal.
double TerminalReward(const GameState& state, int agent);

// Contributions implied by an action sequence from the initial antes/blinds.
std::array<int, 2> ContributionsAfter(GameId game,
                                      std::span<const ActionType> actions,
                                      int round0_length);

}  // namespace dreamcfr

#endif  // DREAMCFR_GAME_H_
