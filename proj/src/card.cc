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

#include <algorithm>
#include <array>

#include "dreamcfr/card.h"
#include "dreamcfr/errors.h"

namespace dreamcfr {
namespace {

constexpr char kRankChars[] = "23456789TJQKA";
constexpr char kSuitChars[] = "cdhs";

}  // namespace

uint32_t FiveCardRank(std::span<const Card, 5> cards) {
  std::array<int, 13> counts{};
  uint64_t seen = 0;
  for (const Card& c : cards) {
    if (c.rank < 0 || c.rank > 12 || c.suit < 0 || c.suit > 3) {
      throw InvalidInputError("card out of range");
    }
    const uint64_t bit = uint64_t{1} << (c.rank * 4 + c.suit);
    if (seen & bit) throw InvalidInputError("duplicate card in hand");
    seen |= bit;
    ++counts[c.rank];
  }

  const bool flush = std::all_of(cards.begin(), cards.end(), [&](const Card& c) {
    return c.suit == cards[0].suit;
  });

  // Ranks ordered by multiplicity, then by rank, strongest first.
  std::array<int, 5> order{};
  int n = 0;
  for (int count = 4; count >= 1; --count) {
    for (int r = 12; r >= 0; --r) {
      if (counts[r] == count) order[n++] = r;
    }
  }
  const int distinct = n;

  int straight_high = -1;
  if (distinct == 5) {
    if (order[0] - order[4] == 4) {
      straight_high = order[0];
    } else if (order[0] == 12 && order[1] == 3) {
      straight_high = 3;  // A-2-3-4-5
    }
  }

  HandCategory category;
  if (straight_high >= 0 && flush) {
    category = HandCategory::kStraightFlush;
  } else if (counts[order[0]] == 4) {
    category = HandCategory::kQuads;
  } else if (counts[order[0]] == 3 && distinct == 2) {
    category = HandCategory::kFullHouse;
  } else if (flush) {
    category = HandCategory::kFlush;
  } else if (straight_high >= 0) {
    category = HandCategory::kStraight;
  } else if (counts[order[0]] == 3) {
    category = HandCategory::kTrips;
  } else if (distinct == 3) {
    category = HandCategory::kTwoPair;
  } else if (distinct == 4) {
    category = HandCategory::kPair;
  } else {
    category = HandCategory::kHighCard;
  }

  uint32_t value = static_cast<uint32_t>(category) << 20;
  if (straight_high >= 0) {
    value |= static_cast<uint32_t>(straight_high) << 16;
    return value;
  }
  for (int k = 0; k < distinct; ++k) {
    value |= static_cast<uint32_t>(order[k]) << (16 - 4 * k);
  }
  return value;
}

uint32_t FhpShowdownRank(std::span<const Card, 2> hole,
                         std::span<const Card, 3> board) {
  const std::array<Card, 5> hand = {hole[0], hole[1], board[0], board[1],
                                    board[2]};
  return FiveCardRank(hand);
}

std::string StandardCardName(Card c) {
  return {kRankChars[c.rank], kSuitChars[c.suit]};
}

Card ParseStandardCard(const std::string& text) {
  if (text.size() != 2) throw InvalidInputError("bad card: " + text);
  const char* r = std::char_traits<char>::find(kRankChars, 13, text[0]);
  const char* s = std::char_traits<char>::find(kSuitChars, 4, text[1]);
  if (r == nullptr || s == nullptr) throw InvalidInputError("bad card: " + text);
  return Card{static_cast<int8_t>(r - kRankChars),
              static_cast<int8_t>(s - kSuitChars)};
}

}  // namespace dreamcfr
