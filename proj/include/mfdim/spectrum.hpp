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

#pragma once

// Scaling curves q -> B(q), their dyadic estimates, Legendre-type infima
// and the inverse-level function psi.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mfdim/measure.hpp"
#include "mfdim/packing.hpp"

namespace mfdim {

enum class CurveProvenance { kEstimated, kAnalytic, kSynthetic };

const char* to_string(CurveProvenance p);

// Piecewise-linear curve through (qs[i], values[i]); qs strictly increasing.
class ScalingCurve {
 public:
  ScalingCurve() = default;
  // Analytic and synthetic curves must be convex and non-increasing to
  // kShapeTolerance; estimated curves are accepted as given.
  ScalingCurve(std::vector<double> qs, std::vector<double> values, CurveProvenance provenance);

  static ScalingCurve analytic(const std::vector<double>& qs, const std::function<double(double)>& b);

  const std::vector<double>& qs() const { return qs_; }
  const std::vector<double>& values() const { return values_; }
  CurveProvenance provenance() const { return provenance_; }
  std::size_t size() const { return qs_.size(); }
  double q_min() const { return qs_.front(); }
  double q_max() const { return qs_.back(); }

  // Linear interpolation; DomainError outside [q_min, q_max].
  double at(double q) const;
  bool non_increasing(double tol) const;
  bool convex(double tol) const;

  static constexpr double kShapeTolerance = 1e-9;

 private:
  std::vector<double> qs_;
  std::vector<double> values_;
  CurveProvenance provenance_ = CurveProvenance::kSynthetic;
};

// Uniform grid lo, lo + step, ..., up to hi (inclusive within rounding).
std::vector<double> q_grid(double lo, double hi, double step);

struct TauFit {
  double q = 0.0;
  double tau_hat = 0.0;   // slope of log2 S_n(q, 0) against n
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square deviation from the fitted line
  bool infinite = false;  // some S_n(q, 0) was +inf
};

// Slopes are an upper proxy for the packing-type scaling function.
struct SpectrumEstimate {
  ScalingCurve curve;
  std::vector<TauFit> fits;
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
};

SpectrumEstimate estimate_tau(const MeasureModel& model, const std::vector<double>& qs,
                              std::size_t n_lo, std::size_t n_hi, unsigned threads = 0,
                              std::size_t enumeration_cap = kDefaultPartitionCap);

inline constexpr double kBoundarySlopeTolerance = 1e-9;

struct LegendreResult {
  bool bracketed = false;  // false: still decreasing at q_max
  bool attained = false;   // false: infimum is a boundary limit at q_max
  double value = 0.0;      // minimum of alpha q + B(q) over [q_min, q_max]
  double argmin = 0.0;     // smallest q reaching it
  double end_slope = 0.0;
};

// inf over q >= q_min of alpha q + B(q) on the curve's range.
LegendreResult legendre_inf(const ScalingCurve& curve, double alpha, double q_min);

// inf { theta : B(theta) < z }; +inf when no curve value is below z.
double psi(const ScalingCurve& curve, double z);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

// Compares inf { psi(eta t) + t : s/eta < t < 0 } with
// inf_{q >= 1} (eta q + B(q)) / eta. Requires a convex non-increasing curve
// with B(1) = 0, min B < 0 and eta > 0; DomainError names the failing one.
IdentityCheck check_level_identity(const ScalingCurve& curve, double eta);

struct OlsenBound {
  bool applicable = false;
  std::string reason;  // set when not applicable
  LegendreResult result;
};

// inf_{q >= 0} (alpha q + B(q)), applicable when alpha q + B(q) >= 0 on the grid.
OlsenBound olsen_bound(const ScalingCurve& curve, double alpha);

}  // namespace mfdim
