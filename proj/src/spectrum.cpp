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

#include "mfdim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfdim/error.hpp"

namespace mfdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArgminTolerance = 1e-12;

}  // namespace

const char* to_string(CurveProvenance p) {
  switch (p) {
    case CurveProvenance::kEstimated: return "estimated";
    case CurveProvenance::kAnalytic: return "analytic";
    case CurveProvenance::kSynthetic: return "synthetic";
  }
  return "?";
}

ScalingCurve::ScalingCurve(std::vector<double> qs, std::vector<double> values,
                           CurveProvenance provenance)
    : qs_(std::move(qs)), values_(std::move(values)), provenance_(provenance) {
  if (qs_.size() < 2 || qs_.size() != values_.size()) {
    throw DomainError("scaling curve needs at least two (q, B) points");
  }
  for (std::size_t i = 0; i < qs_.size(); ++i) {
    if (!std::isfinite(qs_[i]) || std::isnan(values_[i])) throw DomainError("scaling curve holds NaN");
    if (i > 0 && !(qs_[i] > qs_[i - 1])) throw DomainError("scaling curve q grid must increase");
  }
  if (provenance_ != CurveProvenance::kEstimated) {
    if (!non_increasing(kShapeTolerance)) throw DomainError("scaling curve is not non-increasing");
    if (!convex(kShapeTolerance)) throw DomainError("scaling curve is not convex");
  }
}

ScalingCurve ScalingCurve::analytic(const std::vector<double>& qs,
                                    const std::function<double(double)>& b) {
  std::vector<double> v;
  v.reserve(qs.size());
  for (double q : qs) v.push_back(b(q));
  return ScalingCurve(qs, std::move(v), CurveProvenance::kAnalytic);
}

double ScalingCurve::at(double q) const {
  if (q < qs_.front() || q > qs_.back()) {
    std::ostringstream os;
    os << "q = " << q << " outside the curve range [" << qs_.front() << ", " << qs_.back() << "]";
    throw DomainError(os.str());
  }
  const auto it = std::upper_bound(qs_.begin(), qs_.end(), q);
  if (it == qs_.end()) return values_.back();
  const std::size_t j = static_cast<std::size_t>(it - qs_.begin());
  const double w = (q - qs_[j - 1]) / (qs_[j] - qs_[j - 1]);
  if (w == 0.0) return values_[j - 1];
  return values_[j - 1] + w * (values_[j] - values_[j - 1]);
}

bool ScalingCurve::non_increasing(double tol) const {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] > values_[i - 1] + tol) return false;
  }
  return true;
}

bool ScalingCurve::convex(double tol) const {
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) {
    const double left = (values_[i] - values_[i - 1]) / (qs_[i] - qs_[i - 1]);
    const double right = (values_[i + 1] - values_[i]) / (qs_[i + 1] - qs_[i]);
    if (right < left - tol) return false;
  }
  return true;
}

std::vector<double> q_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("q grid needs step > 0 and hi >= lo");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

SpectrumEstimate estimate_tau(const MeasureModel& model, const std::vector<double>& qs,
                              std::size_t n_lo, std::size_t n_hi, unsigned threads,
                              std::size_t enumeration_cap) {
  if (n_hi < n_lo + 1) throw DomainError("n range needs at least two orders");
  if (qs.size() < 2) throw DomainError("q grid needs at least two points");
  const PartitionTable table = partition_table(model, n_hi, qs, threads, enumeration_cap);
  SpectrumEstimate est;
  est.n_lo = n_lo;
  est.n_hi = n_hi;
  std::vector<double> values;
  const auto count = static_cast<long double>(n_hi - n_lo + 1);
  const long double x_mean = 0.5L * static_cast<long double>(n_lo + n_hi);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    TauFit f;
    f.q = qs[i];
    long double y_sum = 0.0L;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
      if (table.infinite(n, i)) f.infinite = true;
      y_sum += table.log2_sum(n, i);
    }
    if (f.infinite) {
      f.tau_hat = kInf;
      f.intercept = kInf;
      f.residual = 0.0;
    } else {
      const long double y_mean = y_sum / count;
      long double sxy = 0.0L;
      long double sxx = 0.0L;
      for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const long double dx = static_cast<long double>(n) - x_mean;
        sxy += dx * (table.log2_sum(n, i) - y_mean);
        sxx += dx * dx;
      }
      const long double slope = sxy / sxx;
      const long double icpt = y_mean - slope * x_mean;
      long double ss = 0.0L;
      for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const long double e = table.log2_sum(n, i) - (icpt + slope * static_cast<long double>(n));
        ss += e * e;
      }
      f.tau_hat = static_cast<double>(slope);
      f.intercept = static_cast<double>(icpt);
      f.residual = static_cast<double>(std::sqrt(ss / count));
    }
    values.push_back(f.tau_hat);
    est.fits.push_back(f);
  }
  est.curve = ScalingCurve(qs, std::move(values), CurveProvenance::kEstimated);
  return est;
}

LegendreResult legendre_inf(const ScalingCurve& curve, double alpha, double q_min) {
  const auto& qs = curve.qs();
  const auto& bs = curve.values();
  if (q_min < curve.q_min() || !(q_min < curve.q_max())) {
    std::ostringstream os;
    os << "legendre_inf: q_min = " << q_min << " outside [" << curve.q_min() << ", "
       << curve.q_max() << ")";
    throw DomainError(os.str());
  }
  // The objective is piecewise linear, so its minimum sits at q_min or a node.
  std::vector<std::pair<double, double>> pts{{q_min, curve.at(q_min)}};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (qs[i] > q_min) pts.emplace_back(qs[i], bs[i]);
  }
  LegendreResult r;
  r.value = kInf;
  for (const auto& [q, b] : pts) {
    const double f = alpha * q + b;
    if (f < r.value) r.value = f;
  }
  for (const auto& [q, b] : pts) {
    if (alpha * q + b <= r.value + kArgminTolerance) {
      r.argmin = q;
      break;
    }
  }
  const std::size_t n = qs.size();
  r.end_slope = alpha + (bs[n - 1] - bs[n - 2]) / (qs[n - 1] - qs[n - 2]);
  if (r.end_slope < -kBoundarySlopeTolerance) {
    r.bracketed = false;
    r.attained = false;
  } else if (r.end_slope < 0.0) {
    r.bracketed = true;
    r.attained = false;
  } else {
    r.bracketed = true;
    r.attained = true;
  }
  return r;
}

double psi(const ScalingCurve& curve, double z) {
  const auto& qs = curve.qs();
  const auto& bs = curve.values();
  if (bs[0] < z) return qs[0];
  for (std::size_t j = 0; j + 1 < qs.size(); ++j) {
    if (bs[j + 1] < z) {
      return qs[j] + (bs[j] - z) / (bs[j] - bs[j + 1]) * (qs[j + 1] - qs[j]);
    }
  }
  return kInf;
}

IdentityCheck check_level_identity(const ScalingCurve& curve, double eta) {
  const auto& qs = curve.qs();
  const auto& bs = curve.values();
  if (!(eta > 0.0)) throw DomainError("identity check: eta must be positive");
  if (!curve.non_increasing(ScalingCurve::kShapeTolerance)) {
    throw DomainError("identity check: curve is not non-increasing");
  }
  if (!curve.convex(ScalingCurve::kShapeTolerance)) {
    throw DomainError("identity check: curve is not convex");
  }
  if (!(curve.q_min() <= 1.0 && 1.0 < curve.q_max()) || std::abs(curve.at(1.0)) > 1e-9) {
    throw DomainError("identity check: B(1) = 0 does not hold");
  }
  const double s = *std::min_element(bs.begin(), bs.end());
  if (!(s < 0.0)) throw DomainError("identity check: inf B < 0 does not hold");

  // t -> psi(eta t) + t is piecewise linear between the levels B(q_j)/eta, so
  // its infimum is reached at a level or at one of the two open ends.
  double lhs = psi(curve, 0.0);
  const std::size_t first_min = static_cast<std::size_t>(std::find(bs.begin(), bs.end(), s) - bs.begin());
  lhs = std::min(lhs, qs[first_min] + s / eta);
  for (double b : bs) {
    if (s < b && b < 0.0) lhs = std::min(lhs, psi(curve, b) + b / eta);
  }
  IdentityCheck c;
  c.lhs = lhs;
  c.rhs = legendre_inf(curve, eta, 1.0).value / eta;
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

OlsenBound olsen_bound(const ScalingCurve& curve, double alpha) {
  OlsenBound o;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double q = curve.qs()[i];
    if (q < 0.0) continue;
    if (alpha * q + curve.values()[i] < -1e-12) {
      std::ostringstream os;
      os << "alpha q + B(q) < 0 at q = " << q;
      o.reason = os.str();
      return o;
    }
  }
  o.applicable = true;
  o.result = legendre_inf(curve, alpha, 0.0);
  return o;
}

}  // namespace mfdim
