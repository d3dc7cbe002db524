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

#include <algorithm>
#include <cmath>
#include <limits>

#include "generators.hpp"
#include "mfdim/error.hpp"
#include "mfdim/packing.hpp"
#include "oracles.hpp"

using namespace mfdim;

namespace {

constexpr long double kInf = std::numeric_limits<long double>::infinity();

Dyadic d(double x) { return Dyadic::from_double(x); }

ConstructionParams desk() {
  ConstructionParams p;
  p.windows = {0.28, 0.34, 0.36, 0.42};
  p.p0 = 0.35;
  p.p1 = 0.65;
  p.n0 = 12;
  p.growth = Growth::parse("geometric(2)");
  return p;
}

std::vector<Dyadic> midpoints(std::size_t order) {
  std::vector<Dyadic> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << order); ++i) {
    out.push_back(DyadicInterval(BigInt(i), static_cast<std::uint32_t>(order)).midpoint());
  }
  return out;
}

}  // namespace

TEST_CASE("centered packing checks") {
  auto anywhere = [](const Dyadic&) { return true; };
  auto below_half = [](const Dyadic& x) { return x < Dyadic(1, 1); };
  CHECK(is_centered_packing({{d(0.25), d(0.125)}}, anywhere, d(0.125)));
  CHECK_FALSE(is_centered_packing({{d(0.75), d(0.125)}}, below_half, d(0.125)));
  CHECK_FALSE(is_centered_packing({{d(0.25), d(0.25)}}, anywhere, d(0.125)));
  CHECK_FALSE(is_centered_packing({{d(0.25), d(0.0)}}, anywhere, d(0.125)));
  // Tangent closed balls overlap.
  CHECK_FALSE(is_centered_packing({{d(0.25), d(0.125)}, {d(0.5), d(0.125)}}, anywhere, d(0.125)));
  CHECK(is_centered_packing({{d(0.25), d(0.125)}, {d(0.5), d(0.0625)}}, anywhere, d(0.125)));
}

TEST_CASE("packing sum conventions") {
  const MeasureModel cas = MeasureModel::cascade(0.4, 0.6);
  // Balls that are exactly the intervals 00, 01 and 11.
  std::vector<Ball> balls;
  long double want = 0.0L;
  for (const char* w : {"00", "01", "11"}) {
    const DyadicInterval iv = interval_of(DyadicWord(w));
    balls.push_back(Ball{iv.midpoint(), Dyadic::pow2_neg(3)});
    want += cas.mass(DyadicWord(w));
  }
  // Closed balls of radius 1/8 around midpoints 1/8 apart from interval ends
  // are disjoint here only because 00 and 01 share an endpoint at distance 1/4.
  const PackingValue one = packing_sum(cas, balls, 1.0, 0.0, 2);
  CHECK(static_cast<double>(one.value) == doctest::Approx(static_cast<double>(want)));
  CHECK(one.lower <= one.value);
  CHECK(one.value <= one.upper);
  CHECK(packing_sum(cas, balls, 0.0, 0.0, 2).value == 3.0L);
  const MeasureModel holes = MeasureModel::explicit_weights({2, {0.5, 0.5, 0.0, 0.0}});
  CHECK(packing_sum(holes, balls, -1.0, 0.0, 2).value == kInf);
  CHECK(packing_term(0.0L, 0.5L, 0.0, 0.0) == 1.0L);
  CHECK(packing_term(0.0L, 0.5L, -0.5, 1.0) == kInf);
  CHECK(packing_term(0.0L, 0.5L, 2.0, 1.0) == 0.0L);
}

TEST_CASE("packing sum enclosure contains deeper values") {
  const MeasureModel m = MeasureModel::selected_family(SelectedFamily::build(desk(), 3));
  testing::Gen gen(41);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Ball> balls;
    Dyadic next = gen.dyadic(10);
    while (balls.size() < 4 && next < Dyadic(3, 2)) {
      const Dyadic r(BigInt(gen.range(1, 40)), 12);
      balls.push_back(Ball{next + r, r});
      next = next + r + r + Dyadic::pow2_neg(12);
    }
    const double q = gen.real(-1.0, 3.0);
    const double t = gen.real(0.0, 1.0);
    const PackingValue coarse = packing_sum(m, balls, q, t, 10);
    const PackingValue deep = packing_sum(m, balls, q, t, 18);
    CHECK(deep.value >= coarse.lower * (1.0L - 1e-12L));
    CHECK(deep.value <= coarse.upper * (1.0L + 1e-12L));
  }
}

TEST_CASE("exact prepacking small cases") {
  const MeasureModel uni = MeasureModel::uniform();
  const std::vector<Dyadic> radii{d(0.0625), d(0.125), d(0.03125)};
  const PrepackingResult one = prepacking_sup_exact(uni, {d(0.5)}, d(0.125), 0.0, 1.0, radii, 10);
  CHECK(one.value == doctest::Approx(0.25));
  // Two points 1/8 apart with radius 1/8: only singletons fit.
  const MeasureModel cas = MeasureModel::cascade(0.25, 0.75);
  const std::vector<Dyadic> pts{d(0.3125), d(0.4375)};
  const PrepackingResult two = prepacking_sup_exact(cas, pts, d(0.125), 1.0, 0.0, {d(0.125)}, 10);
  const long double a = ball_mass_bounds(cas, pts[0], d(0.125), 10).mid();
  const long double b = ball_mass_bounds(cas, pts[1], d(0.125), 10).mid();
  CHECK(two.value == std::max(a, b));
  CHECK(two.packing.size() == 1);
  std::vector<Dyadic> many(17, d(0.5));
  CHECK_THROWS_AS(prepacking_sup_exact(uni, many, d(0.125), 1.0, 0.0, radii, 10), DepthExceededError);
}

TEST_CASE("exact prepacking equals a second enumeration") {
  const MeasureModel uni = MeasureModel::uniform();
  const std::vector<Dyadic> radii{d(0.0625), d(0.03125), d(0.125)};
  for (double q : {-1.0, 0.0, 0.5, 2.0}) {
    for (double t : {0.0, 0.5, 1.0}) {
      const auto pts = midpoints(3);
      const long double want = oracle::prepacking_sup(uni, pts, d(0.125), q, t, radii, 10);
      CHECK(prepacking_sup_exact(uni, pts, d(0.125), q, t, radii, 10).value == want);
    }
  }
}

TEST_CASE("greedy never beats exact, and ties on one candidate") {
  const MeasureModel m = MeasureModel::selected_family(SelectedFamily::build(desk(), 3));
  testing::Gen gen(42);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Dyadic> pts;
    const std::size_t np = gen.range(1, 7);
    for (std::size_t i = 0; i < np; ++i) {
      const Dyadic x = DyadicInterval(BigInt(gen.range(0, 63)), 6).midpoint();
      if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
    }
    std::vector<Dyadic> radii{Dyadic::pow2_neg(static_cast<std::uint32_t>(gen.range(3, 5))),
                              Dyadic::pow2_neg(static_cast<std::uint32_t>(gen.range(5, 7)))};
    const double q = gen.real(-1.0, 3.0);
    const double t = gen.real(0.0, 1.0);
    const long double exact = prepacking_sup_exact(m, pts, d(0.125), q, t, radii, 14).value;
    const long double greedy = greedy_prepacking_estimate(m, pts, d(0.125), q, t, radii, 14).value;
    CHECK(greedy <= exact);
    CHECK(exact == oracle::prepacking_sup(m, pts, d(0.125), q, t, radii, 14));
  }
  const std::vector<Dyadic> single{d(0.375)};
  CHECK(greedy_prepacking_estimate(m, single, d(0.125), 1.0, 0.5, {d(0.0625)}, 14).value ==
        prepacking_sup_exact(m, single, d(0.125), 1.0, 0.5, {d(0.0625)}, 14).value);
}

TEST_CASE("log2 accumulator") {
  Log2Accumulator a;
  CHECK(a.value() == -kInf);
  a.add(3.0L);
  a.add(3.0L);
  CHECK(a.value() == doctest::Approx(4.0));
  a.add(1000.0L);
  CHECK(a.value() == doctest::Approx(1000.0));
  Log2Accumulator b;
  b.merge(a);
  CHECK(b.value() == a.value());
  Log2Accumulator empty;
  b.merge(empty);
  CHECK(b.value() == a.value());
}

TEST_CASE("partition sums") {
  const MeasureModel uni = MeasureModel::uniform();
  for (std::size_t n : {0u, 5u, 12u}) {
    for (double q : {-1.0, 0.0, 0.5, 2.0}) {
      const PartitionSum s = partition_sum(uni, n, q, 0.25);
      CHECK(static_cast<double>(s.log2_value) ==
            doctest::Approx(static_cast<double>(n) * (1.0 - q - 0.25)));
    }
  }
  const MeasureModel cas = MeasureModel::cascade(0.25, 0.75);
  for (double q : {0.0, 0.5, 1.0, 3.0, -2.0}) {
    const long double brute = std::log2(oracle::partition_sum(cas, 8, q));
    const long double closed = 8.0L * std::log2(std::pow(0.25L, q) + std::pow(0.75L, q));
    const long double got = partition_sum(cas, 8, q, 0.0).log2_value;
    CHECK(std::fabs(static_cast<double>(got - brute)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(got - closed)) < 1e-12);
  }
  CHECK_THROWS_AS(partition_sum(uni, 23, 1.0, 0.0), DepthExceededError);
}

TEST_CASE("partition sum properties on built-in models") {
  const auto fam = SelectedFamily::build(desk(), 4);
  const std::vector<MeasureModel> models{MeasureModel::uniform(), MeasureModel::cascade(0.25, 0.75),
                                         MeasureModel::cascade(0.1, 0.9),
                                         MeasureModel::selected_family(fam)};
  for (const MeasureModel& m : models) {
    for (std::size_t n = 1; n <= 14; ++n) {
      CHECK(std::fabs(static_cast<double>(partition_sum(m, n, 1.0, 0.0).log2_value)) < 1e-9);
      // Power means: 1 <= S_n(q, 0) <= 2^{n(1-q)} on [0, 1].
      for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const long double s = partition_sum(m, n, q, 0.0).log2_value;
        CHECK(s <= static_cast<long double>(n) * (1.0L - q) + 1e-9L);
        CHECK(s >= -1e-9L);
      }
      for (double q : {-1.0, 0.5, 2.0}) {
        CHECK(partition_sum(m, n, q, 0.3).log2_value < partition_sum(m, n, q, 0.2).log2_value);
      }
    }
  }
  const MeasureModel holes = MeasureModel::explicit_weights({2, {0.5, 0.5, 0.0, 0.0}});
  CHECK(partition_sum(holes, 2, -1.0, 0.0).infinite);
  CHECK(partition_sum(holes, 2, 0.0, 0.0).log2_value == doctest::Approx(1.0));
}

TEST_CASE("partition tables do not depend on the thread count") {
  const MeasureModel m = MeasureModel::selected_family(SelectedFamily::build(desk(), 4));
  const std::vector<double> qs{-1.0, 0.0, 0.5, 1.0, 3.0};
  const PartitionTable a = partition_table(m, 16, qs, 1);
  const PartitionTable b = partition_table(m, 16, qs, 4);
  for (std::size_t n = 0; n <= 16; ++n) {
    for (std::size_t i = 0; i < qs.size(); ++i) CHECK(a.log2_sum(n, i) == b.log2_sum(n, i));
  }
  for (std::size_t n = 9; n <= 12; ++n) {
    CHECK(static_cast<double>(a.log2_sum(n, 3)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(static_cast<double>(a.log2_sum(n, 1)) == doctest::Approx(static_cast<double>(n)));
  }
}
