// Copyright 2026 The mfdim Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include "generators.hpp"
#include "mfdim/dyadic.hpp"
#include "mfdim/error.hpp"
#include "oracles.hpp"

using namespace mfdim;

namespace {

const TypeWindows kDesk{0.28, 0.34, 0.36, 0.42};

}  // namespace

TEST_CASE("interval_of uses positional weights") {
  CHECK(interval_of(DyadicWord("")) == DyadicInterval(0, 0));
  CHECK(interval_of(DyadicWord("01")).left() == Dyadic(1, 2));
  CHECK(interval_of(DyadicWord("01")).right() == Dyadic(1, 1));
  CHECK(interval_of(DyadicWord("110")).left() == Dyadic(3, 2));
  CHECK(interval_of(DyadicWord("110")).right() == Dyadic(7, 3));
  CHECK(interval_of(DyadicWord("110")).to_string() == "[6/2^3, 7/2^3)");
}

TEST_CASE("zero_count") {
  CHECK(zero_count(DyadicWord("0110")) == 2);
  CHECK(zero_count(DyadicWord("")) == 0);
  CHECK(zero_count(DyadicWord("000")) == 3);
}

TEST_CASE("locate") {
  CHECK(locate(0.3, 2).str() == "01");
  CHECK(locate(0.0, 5).str() == "00000");
  CHECK(locate(0.875, 3).str() == "111");
  CHECK_THROWS_AS(locate(1.0, 3), DomainError);
  CHECK_THROWS_AS(locate(-0.25, 3), DomainError);
}

TEST_CASE("type_of uses strict windows") {
  const TypeWindows tw{0.35, 0.40, 0.42, 0.48};
  auto word_with = [](std::size_t n, std::size_t z) {
    return DyadicWord(std::string(z, '0') + std::string(n - z, '1'));
  };
  CHECK(type_of(word_with(20, 7), tw) == IntervalType::kUntyped);
  CHECK(type_of(word_with(40, 15), tw) == IntervalType::kType1);
  CHECK(type_of(word_with(50, 22), tw) == IntervalType::kType2);
}

TEST_CASE("words tile [0,1) at every order up to 12") {
  for (std::size_t n = 0; n <= 12; ++n) {
    Dyadic total;
    Dyadic expected_left;
    for (const auto& w : oracle::all_words(n)) {
      const DyadicInterval iv = interval_of(DyadicWord(w));
      CHECK(iv.left() == expected_left);  // consecutive, so disjoint and gap-free
      expected_left = iv.right();
      total = total + iv.length();
    }
    CHECK(total == Dyadic::from_int(1));
  }
}

TEST_CASE("nesting and locate round trip on random words") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    const DyadicWord w = gen.word(gen.range(0, 70));
    const DyadicInterval iv = interval_of(w);
    for (int b = 0; b < 2; ++b) CHECK(iv.contains(interval_of(w.child(b))));
    CHECK(locate(iv.midpoint(), w.order()) == w);
    CHECK(DyadicWord::from_index(w.index(), w.order()) == w);
  }
}

TEST_CASE("equal-order intervals are identical or disjoint") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = gen.range(1, 20);
    const DyadicInterval a = interval_of(gen.word(n));
    const DyadicInterval b = interval_of(gen.word(n));
    CHECK((a == b || a.disjoint(b)));
  }
}

TEST_CASE("distance between intervals") {
  const DyadicInterval a = interval_of(DyadicWord("0000"));
  const DyadicInterval b = interval_of(DyadicWord("0100"));
  CHECK(a.distance(b) == Dyadic(3, 4));
  CHECK(b.distance(a) == Dyadic(3, 4));
  CHECK(a.distance(interval_of(DyadicWord("0001"))).is_zero());
}

TEST_CASE("dyadic arithmetic is exact") {
  const Dyadic x = Dyadic::from_double(0.1);
  CHECK(x.to_double() == 0.1);
  CHECK((x - x).is_zero());
  CHECK(Dyadic(6, 3) == Dyadic(3, 2));
  CHECK(Dyadic(5, 3).floor_scaled(2) == 2);
  CHECK(Dyadic(5, 3).ceil_scaled(2) == 3);
  CHECK(Dyadic(3, 2).scaled_pow2(2) == Dyadic::from_int(3));
  CHECK(Dyadic::pow2_neg(200) < Dyadic::pow2_neg(199));
}

TEST_CASE("tilde_set keeps the word's own type") {
  const DyadicWord w("000011111111");
  REQUIRE(type_of(w, kDesk) == IntervalType::kType1);
  const auto got = tilde_set(w, kDesk);
  CHECK(got.size() <= 64);
  std::vector<std::string> expected;
  for (const auto& tail : oracle::all_words(6)) {
    if (oracle::type(w.str() + tail, kDesk) == IntervalType::kType1) expected.push_back(w.str() + tail);
  }
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].str() == expected[i]);
    CHECK(w.is_prefix_of(got[i]));
  }
  CHECK_THROWS_AS(tilde_set(DyadicWord("111111111111"), kDesk), DomainError);
}

TEST_CASE("check_set flips the type and matches enumeration") {
  testing::Gen gen(13);
  int checked = 0;
  while (checked < 20) {
    const std::size_t n = gen.range(3, 12);
    const DyadicWord w = gen.word(n);
    const IntervalType t = type_of(w, kDesk);
    if (t == IntervalType::kUntyped) continue;
    const IntervalType flip = t == IntervalType::kType1 ? IntervalType::kType2 : IntervalType::kType1;
    const auto got = check_set(w, kDesk);
    std::vector<std::string> expected;
    for (const auto& tail : oracle::all_words(n)) {
      if (oracle::type(w.str() + tail, kDesk) == flip) expected.push_back(w.str() + tail);
    }
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].str() == expected[i]);
      CHECK(type_of(got[i], kDesk) == flip);
    }
    ++checked;
  }
  // No order-20 extension lands strictly inside (0.3, 0.35): empty, not an error.
  const TypeWindows narrow{0.05, 0.2, 0.3, 0.35};
  const DyadicWord tiny("0111111111");
  REQUIRE(type_of(tiny, narrow) == IntervalType::kType1);
  CHECK(check_set(tiny, narrow).empty());
  CHECK_FALSE(oracle::has_typed_extension(tiny.str(), 20, IntervalType::kType2, narrow));
  CHECK_THROWS_AS(check_set(DyadicWord(std::string(9, '0') + std::string(21, '1')), kDesk),
                  DepthExceededError);
}

TEST_CASE("contains_type_descendant agrees with enumeration") {
  // Appending zeros to an all-ones word raises its ratio into the window.
  CHECK(contains_type_descendant(DyadicWord("1111"), 10, IntervalType::kType1, kDesk));
  CHECK_FALSE(contains_type_descendant(DyadicWord("0000"), 10, IntervalType::kType1, kDesk));
  for (std::size_t n = 1; n <= 10; ++n) {
    for (const auto& w : oracle::all_words(n)) {
      const DyadicWord word(w);
      if (type_of(word, kDesk) != IntervalType::kUntyped) {
        CHECK(contains_type_descendant(word, n, type_of(word, kDesk), kDesk));
      }
      for (std::size_t target = n; target <= 14; ++target) {
        for (IntervalType t : {IntervalType::kType1, IntervalType::kType2}) {
          if (contains_type_descendant(word, target, t, kDesk) !=
              oracle::has_typed_extension(w, target, t, kDesk)) {
            FAIL("mismatch at ", w, " -> ", target);
          }
        }
      }
    }
  }
}
