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

#ifndef DREAMCFR_CARD_H_
#define DREAMCFR_CARD_H_

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>

namespace dreamcfr {

// A playing card. Ranks are game-relative and ascending: Kuhn and Leduc use
// 0=J, 1=Q, 2=K; the 52-card deck uses 0='2' ... 12='A'. Suits are 0-based.
struct Card {
  int8_t rank = 0;
  int8_t suit = 0;

  auto operator<=>(const Card&) const = default;
};

// Poker hand categories, weakest first.
enum class HandCategory : uint8_t {
  kHighCard = 0,
  kPair,
  kTwoPair,
  kTrips,
  kStraight,
  kFlush,
  kFullHouse,
  kQuads,
  kStraightFlush,
};

// Total-order rank of the five-card hand made of two private and three board
// cards from a standard deck. Larger is stronger; equal values tie.
// Throws InvalidInputError on duplicate or out-of-range cards.
uint32_t FhpShowdownRank(std::span<const Card, 2> hole,
                         std::span<const Card, 3> board);

// Same ordering for an arbitrary five-card hand.
uint32_t FiveCardRank(std::span<const Card, 5> cards);

inline HandCategory CategoryOf(uint32_t rank) {
  return static_cast<HandCategory>(rank >> 20);
}

// "As", "Td", "7c" style names for the 52-card deck.
std::string StandardCardName(Card c);
Card ParseStandardCard(const std::string& text);

}  // namespace dreamcfr

#endif  // DREAMCFR_CARD_H_
