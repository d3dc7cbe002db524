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

#include <cmath>
#include <limits>

#include "generators.hpp"
#include "mfdim/error.hpp"
#include "mfdim/spectrum.hpp"
#include "oracles.hpp"

using namespace mfdim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cascade_tau(double q, double p0, double p1) {
  return std::log2(std::pow(p0, q) + std::pow(p1, q));
}

ScalingCurve line_curve() {
  return ScalingCurve::analytic(q_grid(0.0, 32.0, 0.25), [](double q) { return 1.0 - q; });
}

// Convex, non-increasing curves with B(1) = 0 and negative infimum.
std::vector<ScalingCurve> identity_suite() {
  std::vector<ScalingCurve> out;
  out.push_back(line_curve());  // s = -inf, truncated by the grid
  out.push_back(ScalingCurve({0.0, 1.0, 2.0, 8.0}, {1.0, 0.0, -0.5, -0.5},
                             CurveProvenance::kSynthetic));  // flat tail
  out.push_back(ScalingCurve::analytic(q_grid(0.0, 32.0, 0.25),
                                       [](double q) { return cascade_tau(q, 0.25, 0.75); }));
  out.push_back(ScalingCurve({0.0, 0.5, 1.0, 2.0, 4.0, 9.0}, {2.0, 1.0, 0.0, -0.3, -0.5, -0.6},
                             CurveProvenance::kSynthetic));
  out.push_back(ScalingCurve::analytic(q_grid(0.0, 10.0, 0.125), [](double q) {
    return q <= 6.0 ? 1.0 - q + 0.1 * (q - 1.0) * (q - 1.0) : -2.5;
  }));
  out.push_back(ScalingCurve({-2.0, 0.0, 1.0, 3.0, 5.0}, {5.0, 1.5, 0.0, -1.0, -1.2},
                             CurveProvenance::kSynthetic));
  return out;
}

// Smallest q on a fine grid with B(q) < z.
double psi_scan(const ScalingCurve& c, double z) {
  const std::size_t steps = 400000;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double q = c.q_min() + (c.q_max() - c.q_min()) * static_cast<double>(i) / steps;
    if (c.at(q) < z) return q;
  }
  return kInf;
}

}  // namespace

TEST_CASE("curve construction and shape") {
  CHECK_THROWS_AS(ScalingCurve({0.0, 1.0}, {0.0, 1.0}, CurveProvenance::kAnalytic), DomainError);
  CHECK_THROWS_AS(ScalingCurve({0.0, 1.0, 2.0}, {1.0, 0.9, -1.0}, CurveProvenance::kSynthetic),
                  DomainError);
  CHECK_THROWS_AS(ScalingCurve({0.0, 0.0}, {1.0, 1.0}, CurveProvenance::kSynthetic), DomainError);
  const ScalingCurve est({0.0, 1.0, 2.0}, {1.0, 0.9, -1.0}, CurveProvenance::kEstimated);
  CHECK_FALSE(est.convex(1e-9));
  CHECK(est.non_increasing(1e-9));
  CHECK(line_curve().at(2.5) == doctest::Approx(-1.5));
  CHECK_THROWS_AS(line_curve().at(40.0), DomainError);
  CHECK(q_grid(0.0, 1.0, 0.25).size() == 5);
}

TEST_CASE("tau estimates on closed-form models") {
  const auto qs = q_grid(-1.0, 10.0, 0.5);
  const SpectrumEstimate uni = estimate_tau(MeasureModel::uniform(), qs, 8, 16);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(std::fabs(uni.curve.values()[i] - (1.0 - qs[i])) <= 1e-9);
    CHECK(uni.fits[i].residual <= 1e-9);
  }
  const SpectrumEstimate cas = estimate_tau(MeasureModel::cascade(0.25, 0.75), qs, 8, 16);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(std::fabs(cas.curve.values()[i] - cascade_tau(qs[i], 0.25, 0.75)) <= 0.02);
    if (qs[i] == 1.0) CHECK(std::fabs(cas.curve.values()[i]) <= 1e-9);
    if (qs[i] == 0.0) CHECK(std::fabs(cas.curve.values()[i] - 1.0) <= 1e-9);
  }
  CHECK_THROWS_AS(estimate_tau(MeasureModel::uniform(), qs, 8, 8), DomainError);
}

TEST_CASE("tau estimate on the desk model") {
  ConstructionParams p;
  p.windows = {0.28, 0.34, 0.36, 0.42};
  p.p0 = 0.35;
  p.p1 = 0.65;
  p.n0 = 12;
  p.growth = Growth::parse("geometric(2)");
  const MeasureModel m = MeasureModel::selected_family(SelectedFamily::build(p, 4));
  const auto qs = q_grid(0.0, 10.0, 0.25);
  const SpectrumEstimate e = estimate_tau(m, qs, 8, 18);
  CHECK(e.curve.non_increasing(1e-3));
  CHECK(e.curve.convex(1e-3));
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double q = qs[i];
    const double b = e.curve.values()[i];
    if (q == 0.0) CHECK(std::fabs(b - 1.0) <= 1e-9);
    if (q == 1.0) CHECK(std::fabs(b) <= 1e-9);
    if (q >= 1.0) CHECK(b <= 1.0 + q * std::log2(0.65) + 0.05);
    if (q < 1.0) CHECK(b >= 1.0 - q - 0.05);
  }
}

TEST_CASE("legendre infima") {
  const ScalingCurve line = line_curve();
  const LegendreResult flat = legendre_inf(line, 1.0, 0.0);
  CHECK(flat.value == doctest::Approx(1.0));
  CHECK(flat.bracketed);
  CHECK(flat.attained);
  CHECK(flat.argmin == 0.0);
  const LegendreResult falling = legendre_inf(line, 0.5, 0.0);
  CHECK_FALSE(falling.bracketed);
  CHECK(falling.end_slope == doctest::Approx(-0.5));

  const ScalingCurve cas = ScalingCurve::analytic(
      q_grid(0.0, 32.0, 0.25), [](double q) { return cascade_tau(q, 0.25, 0.75); });
  const double alpha = -std::log2(0.75);
  const LegendreResult limit = legendre_inf(cas, alpha, 0.0);
  CHECK(limit.bracketed);
  CHECK_FALSE(limit.attained);
  CHECK(limit.value >= 0.0);
  CHECK(limit.value < 1e-12);
  CHECK_THROWS_AS(legendre_inf(line, 1.0, 40.0), DomainError);
}

TEST_CASE("legendre infima match a dense scan") {
  testing::Gen gen(51);
  for (int trial = 0; trial < 40; ++trial) {
    const double p0 = gen.real(0.05, 0.45);
    const ScalingCurve c = ScalingCurve::analytic(
        q_grid(0.0, 16.0, 0.125), [&](double q) { return cascade_tau(q, p0, 1.0 - p0); });
    const double alpha = gen.real(-std::log2(1.0 - p0) + 0.05, 1.5);
    const double q_min = gen.coin() ? 0.0 : 1.0;
    const LegendreResult r = legendre_inf(c, alpha, q_min);
    const double scan = oracle::scan_min([&](double q) { return alpha * q + c.at(q); }, q_min, 16.0,
                                         200000);
    CHECK(std::fabs(r.value - scan) <= 1e-4);
    CHECK(r.argmin >= q_min);
  }
}

TEST_CASE("psi") {
  const ScalingCurve line = line_curve();
  CHECK(psi(line, -1.0) == doctest::Approx(2.0));
  CHECK(psi(line, 0.0) == doctest::Approx(1.0));
  CHECK(psi(line, -100.0) == kInf);
  const ScalingCurve pw({0.0, 0.5, 1.0, 2.0, 4.0, 9.0}, {2.0, 1.0, 0.0, -0.3, -0.5, -0.6},
                        CurveProvenance::kSynthetic);
  for (double z : {1.9, 1.0, 0.4, -0.1, -0.31, -0.55, -0.599}) {
    CHECK(std::fabs(psi(pw, z) - psi_scan(pw, z)) <= 1e-4);
  }
}

TEST_CASE("level identity on the synthetic suite") {
  const auto suite = identity_suite();
  REQUIRE(suite.size() >= 5);
  for (const ScalingCurve& c : suite) {
    for (double eta : {0.5, 0.9, 1.0, 1.3, 2.0, 3.5}) {
      const IdentityCheck r = check_level_identity(c, eta);
      CHECK(r.residual <= 1e-6);
      const double rhs_scan =
          oracle::scan_min([&](double q) { return eta * q + c.at(q); }, 1.0, c.q_max(), 400000) / eta;
      CHECK(r.rhs == doctest::Approx(rhs_scan).epsilon(1e-6));
    }
  }
  const IdentityCheck two = check_level_identity(line_curve(), 2.0);
  CHECK(two.lhs == doctest::Approx(1.0));
  CHECK(two.rhs == doctest::Approx(1.0));
  const IdentityCheck one = check_level_identity(line_curve(), 1.0);
  CHECK(one.lhs == doctest::Approx(1.0));
  CHECK(one.rhs == doctest::Approx(1.0));
}

TEST_CASE("level identity names the failing hypothesis") {
  auto message = [](const ScalingCurve& c, double eta) {
    try {
      check_level_identity(c, eta);
    } catch (const DomainError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const ScalingCurve shifted({0.0, 1.0, 2.0}, {1.5, 0.5, -0.5}, CurveProvenance::kSynthetic);
  CHECK(message(shifted, 1.0).find("B(1) = 0") != std::string::npos);
  const ScalingCurve flat({0.0, 1.0, 2.0}, {1.0, 0.0, 0.0}, CurveProvenance::kSynthetic);
  CHECK(message(flat, 1.0).find("inf B < 0") != std::string::npos);
  const ScalingCurve bent({0.0, 1.0, 2.0}, {1.0, 0.0, -2.0}, CurveProvenance::kEstimated);
  CHECK(message(bent, 1.0).find("convex") != std::string::npos);
  CHECK(message(line_curve(), 0.0).find("eta") != std::string::npos);
}

TEST_CASE("olsen bound") {
  const OlsenBound b = olsen_bound(line_curve(), 1.0);
  CHECK(b.applicable);
  CHECK(b.result.value == doctest::Approx(1.0));
  const OlsenBound bad = olsen_bound(line_curve(), 0.5);
  CHECK_FALSE(bad.applicable);
  CHECK_FALSE(bad.reason.empty());
  // A cascade at its own most likely exponent.
  const double p0 = 0.3;
  const ScalingCurve c = ScalingCurve::analytic(
      q_grid(0.0, 32.0, 0.25), [&](double q) { return cascade_tau(q, p0, 1.0 - p0); });
  const double alpha = -(p0 * std::log2(p0) + (1.0 - p0) * std::log2(1.0 - p0));
  const OlsenBound o = olsen_bound(c, alpha);
  REQUIRE(o.applicable);
  const double scan = oracle::scan_min([&](double q) { return alpha * q + c.at(q); }, 0.0, 32.0, 320000);
  CHECK(std::fabs(o.result.value - scan) <= 1e-4);
}
