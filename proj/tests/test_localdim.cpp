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

#include "generators.hpp"
#include "mfdim/error.hpp"
#include "mfdim/localdim.hpp"
#include "oracles.hpp"

using namespace mfdim;

namespace {

ConstructionParams desk() {
  ConstructionParams p;
  p.windows = {0.28, 0.34, 0.36, 0.42};
  p.p0 = 0.35;
  p.p1 = 0.65;
  p.n0 = 12;
  p.growth = Growth::parse("geometric(2)");
  return p;
}

std::shared_ptr<const SelectedFamily> desk_family() {
  static const auto f = SelectedFamily::build(desk(), 6);
  return f;
}

Dyadic mid(const std::string& w) { return interval_of(DyadicWord(w)).midpoint(); }

// Every assignment of (center, radius, part) to every base index.
double brute_lk(const MeasureModel& model, const std::vector<Dyadic>& pts,
                const std::vector<Ball>& base, const std::vector<Dyadic>& radii, std::size_t k,
                std::size_t depth) {
  std::vector<Ball> pool;
  std::vector<long double> log2_mass;
  for (const Dyadic& y : pts) {
    for (const Dyadic& r : radii) {
      pool.push_back(Ball{y, r});
      log2_mass.push_back(std::log2(oracle::ball_mass(model, y, r, depth, true)));
    }
  }
  const std::size_t choices = pool.size() * k;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < base.size(); ++i) total *= choices;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<std::size_t> cand;
    std::vector<std::size_t> part;
    std::uint64_t c = code;
    for (std::size_t i = 0; i < base.size(); ++i, c /= choices) {
      cand.push_back((c % choices) / k);
      part.push_back((c % choices) % k);
    }
    bool ok = true;
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; ok && i < base.size(); ++i) {
      for (std::size_t j = 0; ok && j < i; ++j) {
        if (part[i] != part[j]) continue;
        const Ball& a = pool[cand[i]];
        const Ball& b = pool[cand[j]];
        ok = (a.center - b.center).abs() > a.radius + b.radius;
      }
      const long double d = std::log2(2.0L * base[i].radius.to_long_double());
      v = std::max(v, static_cast<double>(log2_mass[cand[i]] / d));
    }
    if (ok) best = std::min(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("exponent traces") {
  const MeasureModel uni = MeasureModel::uniform();
  const ExponentTrace t = exponent_trace(uni, Dyadic::from_double(0.3), {1, 5, 40, 300});
  for (const auto& s : t.samples) CHECK(s.exponent == doctest::Approx(1.0).epsilon(1e-12));

  const MeasureModel sel = MeasureModel::selected_family(desk_family());
  const DyadicWord start = desk_family()->generation(0).front().word;
  const std::vector<std::size_t> depths = {12, 18, 24, 30, 36, 42, 60, 90};
  const ExponentTrace path = exponent_trace_selected(sel, start, depths);
  DyadicWord cur = start;
  for (const auto& s : path.samples) {
    while (cur.order() < s.n) cur = desk_family()->sons(cur).front();
    const double n = static_cast<double>(s.n);
    CHECK(s.exponent == doctest::Approx(desk().g(cur.zero_count() / n)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(exponent_trace_selected(sel, DyadicWord(std::string(12, '1')), depths),
                  DomainError);
  CHECK_THROWS_AS(exponent_trace_selected(uni, start, depths), DomainError);

  const ExponentTrace off = exponent_trace(sel, Dyadic::from_double(0.75), {2000});
  CHECK(std::fabs(off.samples.back().exponent - 1.0) <= 0.05);
}

TEST_CASE("level-set sampling") {
  const MeasureModel uni = MeasureModel::uniform();
  std::vector<Dyadic> xs;
  for (int i = 0; i < 16; ++i) xs.push_back(Dyadic(BigInt(33 + 2 * i), 7));  // inside [1/4, 3/4]
  const LevelSetSample s = level_set_sample(uni, 1.0, 1.2, 1, 12, xs);
  CHECK(s.members.size() == xs.size());
  CHECK_THROWS_AS(level_set_sample(uni, 1.0, 1.0, 1, 12, xs), DomainError);
  CHECK_THROWS_AS(level_set_sample(uni, 1.0, 1.2, 0, 12, xs), DomainError);

  const MeasureModel cas = MeasureModel::cascade(0.3, 0.7);
  testing::Gen gen(7);
  std::vector<Dyadic> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(Dyadic(BigInt(2 * gen.range(0, 1023) + 1), 11));
  const double alpha = 0.8;
  for (double eta : {0.85, 1.0, 1.2}) {
    for (std::uint64_t p : {1u, 4u, 64u}) {
      const LevelSetSample a = level_set_sample(cas, alpha, eta, p, 12, pts);
      const LevelSetSample wider_p = level_set_sample(cas, alpha, eta, p * 4, 12, pts);
      const LevelSetSample wider_eta = level_set_sample(cas, alpha, eta + 0.1, p, 12, pts);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (a.passed[i]) CHECK(wider_p.passed[i]);
        if (a.passed[i]) CHECK(wider_eta.passed[i]);
        if (a.passed[i]) CHECK(a.limsup_proxy[i] <= alpha + kLevelSetSlack);
      }
    }
  }
}

TEST_CASE("u rules") {
  CHECK(apply_u_rule(URule::kEpsilon, Dyadic::pow2_neg(10)) == Dyadic::pow2_neg(10));
  CHECK(apply_u_rule(URule::kSqrtEpsilon, Dyadic::pow2_neg(10)) == Dyadic::pow2_neg(5));
  const Dyadic u = apply_u_rule(URule::kSqrtEpsilon, Dyadic::pow2_neg(11));
  const double e = Dyadic::pow2_neg(11).to_double();
  CHECK(u.to_double() >= std::sqrt(e));
  CHECK(u.to_double() <= 2.0 * std::sqrt(e));
  CHECK(parse_u_rule("sqrt-eps") == URule::kSqrtEpsilon);
  CHECK_THROWS_AS(parse_u_rule("half"), UsageError);
}

TEST_CASE("replacement family validity and value") {
  const std::vector<Dyadic> m = {mid("0001"), mid("0100"), mid("1010")};
  const Dyadic u = Dyadic::pow2_neg(4);
  ReplacementFamily f;
  f.balls = {Ball{m[0], Dyadic::pow2_neg(5)}, Ball{m[0], Dyadic::pow2_neg(4)}};
  f.part = {0, 1};
  f.parts = 2;
  CHECK(is_pk_valid(f, m, u, 2));
  CHECK_FALSE(is_pk_valid(f, m, u, 1));
  f.part = {0, 0};
  f.parts = 1;
  CHECK_FALSE(is_pk_valid(f, m, u, 2));
  f.balls[1] = Ball{Dyadic::from_double(0.9), Dyadic::pow2_neg(5)};
  CHECK_FALSE(is_pk_valid(f, m, u, 2));
  f.balls[1] = Ball{m[2], Dyadic::pow2_neg(3)};
  CHECK_FALSE(is_pk_valid(f, m, u, 2));

  const MeasureModel uni = MeasureModel::uniform();
  const std::vector<Ball> base = {Ball{m[0], Dyadic::pow2_neg(5)}, Ball{m[1], Dyadic::pow2_neg(5)}};
  ReplacementFamily g;
  g.balls = {Ball{m[0], Dyadic::pow2_neg(4)}, Ball{m[1], Dyadic::pow2_neg(6)}};
  g.part = {0, 0};
  g.parts = 1;
  // mass 2^-3 over diameter 2^-4, mass 2^-5 over 2^-4
  CHECK(family_value(uni, base, g, 12) == doctest::Approx(1.25));
}

TEST_CASE("L^k search") {
  const MeasureModel uni = MeasureModel::uniform();
  const std::size_t n = 6;
  const Dyadic y = mid("010110");
  LkOptions o;
  o.k = 1;
  o.u = Dyadic::pow2_neg(n);
  o.radius_exponents = {6, 7, 8};
  o.depth = 14;
  const std::vector<Ball> base = {Ball{y, Dyadic::pow2_neg(7)}};
  const LkResult one = lk_estimate(uni, {y}, base, o);
  CHECK(one.base_value == doctest::Approx(1.0));
  // A single point takes the smallest ratio over the radii.
  CHECK(one.value == doctest::Approx(5.0 / 6.0));
  CHECK(one.exhaustive);

  o.u = Dyadic::pow2_neg(8);
  CHECK_THROWS_AS(lk_estimate(uni, {y}, base, o), InfeasibleError);
  o.u = Dyadic::pow2_neg(n);
  o.k = 0;
  CHECK_THROWS_AS(lk_estimate(uni, {y}, base, o), DomainError);

  testing::Gen gen(11);
  const MeasureModel cas = MeasureModel::cascade(0.3, 0.7);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<Dyadic> pts;
    while (pts.size() < 3) {
      const Dyadic x = mid(gen.word(5).str());
      if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<Ball> b;
    for (const Dyadic& x : pts) {
      const Ball ball{x, Dyadic::pow2_neg(6)};
      if (b.empty() || balls_disjoint(b.back(), ball)) b.push_back(ball);
    }
    LkOptions lo;
    lo.u = Dyadic::pow2_neg(5);
    lo.radius_exponents = {5, 6, 7};
    lo.depth = 12;
    lo.seed = gen.next();
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= 3; ++k) {
      lo.k = k;
      const LkResult r = lk_estimate(cas, pts, b, lo);
      REQUIRE(r.exhaustive);
      const double want = std::min(
          r.base_value, brute_lk(cas, pts, b,
                                 {Dyadic::pow2_neg(5), Dyadic::pow2_neg(6), Dyadic::pow2_neg(7)},
                                 k, 12));
      CHECK(r.value == doctest::Approx(want).epsilon(1e-12));
      CHECK(r.value <= prev + 1e-12);
      CHECK(r.value <= r.base_value);
      CHECK(is_pk_valid(r.family, pts, lo.u, k));
      CHECK(family_value(cas, b, r.family, 12) == doctest::Approx(r.value).epsilon(1e-12));
      prev = r.value;
    }
  }
}

TEST_CASE("partner witness on the selected family") {
  const MeasureModel sel = MeasureModel::selected_family(desk_family());
  const double bound = desk().g(desk().windows.gamma1) + 0.05;
  TOptions t;
  t.k = 2;
  t.node_budget = 200000;
  for (const CandidateSet& set : selected_candidate_sets(*desk_family(), 2)) {
    const InstanceDetail d = carrier_instance_detail(sel, set.points, set.order, t);
    CHECK(d.instance.has_witness);
    CHECK(d.witness.valid);
    CHECK(d.witness.partners_type1);
    CHECK(d.witness.value <= bound);
    CHECK(d.instance.l_value <= d.instance.base_value);
    CHECK(d.instance.l_value <= d.witness.value);
  }
  // Dropping a partner leaves the witness invalid.
  const CandidateSet set = selected_candidate_sets(*desk_family(), 2).front();
  std::vector<Dyadic> half(set.points.begin(), set.points.begin() + 1);
  const InstanceDetail lone = carrier_instance_detail(sel, half, set.order, t);
  if (lone.witness.moved + (lone.witness.partners_in_carrier ? 0 : 1) > 0) {
    CHECK_FALSE(lone.witness.valid);
  }
  CHECK_THROWS_AS(carrier_instance_detail(sel, {}, set.order, t), DomainError);
}

TEST_CASE("candidate sets") {
  const auto sets = selected_candidate_sets(*desk_family(), 2);
  REQUIRE(sets.size() == desk_family()->generation_count() - 2);
  for (const CandidateSet& s : sets) {
    CHECK(s.points.size() == s.partner.size());
    for (std::size_t i = 0; i < s.partner.size(); ++i) {
      REQUIRE(s.partner[i] >= 0);
      CHECK(s.partner[static_cast<std::size_t>(s.partner[i])] == static_cast<std::ptrdiff_t>(i));
    }
  }
  const CandidateSet d = dyadic_candidate_set(6, 4, 100);
  CHECK(d.points.size() == 16);
  CHECK(d.points[1] == mid("000100"));
  CHECK(dyadic_candidate_set(10, 2, 7).points.size() == 7);
  CHECK_THROWS_AS(dyadic_candidate_set(6, 1, 10), DomainError);
}

TEST_CASE("t estimate rows stay below eta") {
  const MeasureModel sel = MeasureModel::selected_family(desk_family());
  TOptions t;
  t.etas = {1.02, 1.1};
  t.ps = {2048};
  t.candidates = selected_candidate_sets(*desk_family(), 2);
  t.node_budget = 200000;
  const double alpha = desk().g(desk().windows.gamma2);
  const TEstimate e = t_estimate(sel, alpha, t);
  REQUIRE(e.rows.size() == 2);
  for (const TRow& r : e.rows) {
    CHECK(r.defined);
    CHECK(r.t_hat <= r.eta + 0.05);
    for (const TInstance& i : r.instances) CHECK(i.l_value <= r.t_hat);
  }
  t.etas = {alpha};
  CHECK_THROWS_AS(t_estimate(sel, alpha, t), DomainError);
}

TEST_CASE("bound comparison") {
  const ScalingCurve line =
      ScalingCurve::analytic(q_grid(0.0, 8.0, 0.25), [](double q) { return 1.0 - q; });
  const BoundComparison same = compare_bounds(line, 1.0, 1.0);
  CHECK(same.olsen == doctest::Approx(1.0));
  CHECK(same.improved == doctest::Approx(1.0));
  CHECK_FALSE(same.improvement);
  CHECK(same.bracketed);

  const ScalingCurve cas = ScalingCurve::analytic(q_grid(0.0, 32.0, 0.25), [](double q) {
    return std::log2(std::pow(0.35, q) + std::pow(0.65, q));
  });
  const BoundComparison c = compare_bounds(cas, 0.7, 0.6);
  CHECK(c.ratio == doctest::Approx(0.6 / 0.7));
  CHECK(c.improved == doctest::Approx(c.ratio * c.inf_from_one.value));
  CHECK(c.improvement == (c.bracketed && c.improved < c.olsen));
  CHECK_THROWS_AS(compare_bounds(line, 0.0, 1.0), DomainError);
}
