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

#ifndef DREAMCFR_EVALUATION_H_
#define DREAMCFR_EVALUATION_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dreamcfr/game_tree.h"
#include "dreamcfr/policy.h"

namespace dreamcfr {

// Action probabilities of `policy` at every infoset of `tree`, indexed like
// tree.infosets(). Entries for the other player are left empty when
// `player` is 0 or 1.
std::vector<std::vector<double>> TabulateOnTree(const GameTree& tree,
                                                const PolicySource& policy,
                                                int player = -1);

// Expected payoff to player 0 when both players follow `policy`.
double ExpectedValue(const GameTree& tree, const PolicySource& policy);

struct BestResponseResult {
  double value = 0.0;  // exploiter's expected chips
  TabularPolicy policy;
};

BestResponseResult BestResponse(const GameTree& tree,
                                const PolicySource& policy, int exploiter);
// Builds the tree; throws FeasibilityError for flop hold'em.
BestResponseResult BestResponse(GameId game, const PolicySource& policy,
                                int exploiter);

struct ExploitabilityResult {
  std::array<double, 2> br_value{};
  double total_chips = 0.0;
  double mbb = 0.0;             // sum convention
  double per_player_mbb = 0.0;  // sum / 2
  int big_blind = 100;
};

ExploitabilityResult Exploitability(const GameTree& tree,
                                    const PolicySource& policy,
                                    int big_blind = 100);
ExploitabilityResult Exploitability(GameId game, const PolicySource& policy,
                                    int big_blind = 100);

inline double ToMbb(double chips, int big_blind) {
  return chips / big_blind * 1000.0;
}

struct MatchResult {
  double mean = 0.0;  // chips per hand won by the first policy
  double ci95 = 0.0;  // half-width of the normal-approximation interval
  int64_t hands = 0;
};

// Plays `hands` hands with seats alternating every hand. With duplicate
// dealing, hands 2k and 2k+1 share the card and action random streams.
MatchResult HeadToHead(GameId game, const PolicySource& a,
                       const PolicySource& b, int64_t hands, uint64_t seed,
                       bool duplicate = true);

// Fixed opponents used where an exact best response is out of reach.
struct ProbeOpponent {
  std::string name;
  std::unique_ptr<PolicySource> policy;
};
// always-call, always-raise, fold-to-raise, uniform.
std::vector<ProbeOpponent> ProbeOpponents();

struct ProbeEvaluation {
  std::vector<std::pair<std::string, MatchResult>> matches;  // agent's view
  // Sum-convention lower bound on exploitability: twice the best probe's
  // mean winnings, clipped at zero.
  double lower_bound_chips = 0.0;
  double lower_bound_mbb = 0.0;
};

ProbeEvaluation EvaluateAgainstProbes(GameId game, const PolicySource& agent,
                                      int64_t hands, uint64_t seed,
                                      int big_blind = 100);

}  // namespace dreamcfr

#endif  // DREAMCFR_EVALUATION_H_
