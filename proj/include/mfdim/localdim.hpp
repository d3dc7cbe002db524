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

// Local scaling exponents, finite-scale level sets, replacement-family
// searches for the L^k quantities, the two-part witness family and the
// comparison of the two multifractal upper bounds.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mfdim/measure.hpp"
#include "mfdim/packing.hpp"
#include "mfdim/spectrum.hpp"

namespace mfdim {

struct ExponentSample {
  std::size_t n = 0;
  double exponent = 0.0;  // log mass(I_n) / log 2^-n
};

struct ExponentTrace {
  std::string point;  // binary expansion prefix or selected word
  std::vector<ExponentSample> samples;
};

// Exponents of the order-n intervals containing x.
ExponentTrace exponent_trace(const MeasureModel& model, const Dyadic& x,
                             const std::vector<std::size_t>& depths);
// Exponents along the path through `start` that keeps taking the first son.
ExponentTrace exponent_trace_selected(const MeasureModel& model, const DyadicWord& start,
                                      const std::vector<std::size_t>& depths);

struct LevelSetSample {
  double alpha = 0.0;
  double eta = 0.0;
  std::uint64_t p = 1;
  std::size_t depth = 0;
  std::vector<Dyadic> members;
  // Per candidate, in input order.
  std::vector<bool> passed;
  std::vector<double> limsup_proxy;  // largest ball exponent over the deeper radii
};

inline constexpr double kLevelSetSlack = 0.05;
inline constexpr std::size_t kExtraResolution = 8;

// Radii 2^-m, m = 1..depth. A candidate passes when the lower mass bound
// meets (2r)^eta at every radius with 2r < 1/p and the ball exponents over
// the deeper half of the radii stay below alpha + slack.
LevelSetSample level_set_sample(const MeasureModel& model, double alpha, double eta,
                                std::uint64_t p, std::size_t depth,
                                const std::vector<Dyadic>& candidates,
                                double slack = kLevelSetSlack);

// Balls indexed like a base packing, each assigned to one of `parts` groups.
struct ReplacementFamily {
  std::vector<Ball> balls;
  std::vector<std::size_t> part;
  std::size_t parts = 0;
};

enum class URule { kEpsilon, kSqrtEpsilon };
const char* to_string(URule r);
URule parse_u_rule(const std::string& text);
// eps for kEpsilon; a power of two between sqrt(eps) and 2 sqrt(eps) otherwise.
Dyadic apply_u_rule(URule rule, const Dyadic& epsilon);

// At most k parts, each a centered u-packing of the points in `carrier`.
bool is_pk_valid(const ReplacementFamily& family, const std::vector<Dyadic>& carrier,
                 const Dyadic& u, std::size_t k);

// sup_i log mu(B(y_i, d_i)) / log(2 r_i), masses from enclosure midpoints.
double family_value(const MeasureModel& model, const std::vector<Ball>& base,
                    const ReplacementFamily& family, std::size_t depth);

inline constexpr std::size_t kMaxParts = 4;

struct LkOptions {
  std::size_t k = 2;
  Dyadic u;                                   // replacement radius bound
  std::vector<std::uint32_t> radius_exponents;  // candidate radii 2^-j
  std::size_t depth = 0;                      // mass resolution order
  std::uint64_t node_budget = 2'000'000;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
  std::vector<ReplacementFamily> hints;
};

struct LkResult {
  double value = 0.0;
  double base_value = 0.0;  // the base packing used as its own family
  ReplacementFamily family;
  bool exhaustive = false;  // search finished within the node budget
  std::uint64_t nodes = 0;
};

// Best family found over centers in M and the candidate radii, never worse
// than the base packing or any hint. InfeasibleError when a base radius
// exceeds u.
LkResult lk_estimate(const MeasureModel& model, const std::vector<Dyadic>& carrier,
                     const std::vector<Ball>& base, const LkOptions& options);

struct WitnessResult {
  ReplacementFamily family;
  double value = 0.0;
  bool valid = false;  // a two-part family of u-packings of M
  std::size_t kept = 0;       // indices whose enclosed selected interval is type 1
  std::size_t moved = 0;      // indices sent to the partner interval
  bool partners_type1 = true; // every moved index landed on a type-1 partner
  bool partners_in_carrier = true;
};

// Keeps balls whose largest enclosed selected interval is type 1 and moves
// the others onto their partner interval, radius 2^-n. Needs the
// selected-family model; a partner without a point of M leaves the family
// invalid.
WitnessResult partner_witness(const MeasureModel& model, const std::vector<Dyadic>& carrier,
                            const std::vector<Ball>& base, const Dyadic& u, std::size_t depth);

// Candidate points of one order (midpoints of order-`order` intervals).
struct CandidateSet {
  std::size_t order = 0;
  std::vector<Dyadic> points;
  // Index of each point's partner, or -1. When present, sampled subsets keep
  // a point only together with its partner.
  std::vector<std::ptrdiff_t> partner;
};

// Midpoints of the selected intervals of each eager generation from
// `first_generation` on.
std::vector<CandidateSet> selected_candidate_sets(const SelectedFamily& family,
                                                  std::size_t first_generation = 2);
// Midpoints of every `stride`-th order-n interval, at most `limit` of them.
CandidateSet dyadic_candidate_set(std::size_t order, std::size_t stride, std::size_t limit);

struct TOptions {
  std::vector<double> etas;
  std::vector<std::uint64_t> ps;
  std::vector<CandidateSet> candidates;
  std::size_t k = 2;
  URule u_rule = URule::kEpsilon;
  std::uint64_t node_budget = 2'000'000;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
  double slack = kLevelSetSlack;
};

struct TInstance {
  std::size_t order = 0;
  std::size_t members = 0;
  double base_value = 0.0;
  double lk_value = 0.0;
  bool exhaustive = false;
  bool has_witness = false;
  double witness_value = 0.0;
  bool witness_valid = false;
  double l_value = 0.0;  // min(lk, valid witness)
};

struct TRow {
  double eta = 0.0;
  std::uint64_t p = 1;
  bool defined = false;  // some candidate set left a non-empty level set
  double t_hat = 0.0;    // max over instances of l_value
  double witness_bound = 0.0;
  std::vector<TInstance> instances;
};

struct TEstimate {
  double alpha = 0.0;
  std::vector<TRow> rows;  // eta-major, in option order
};

struct InstanceDetail {
  TInstance instance;
  LkResult search;
  WitnessResult witness;  // meaningful when instance.has_witness
};

// One instance on a fixed carrier of order-n points: base packing of radius
// 2^-(n+1), eps = 2^-n, u from the rule. Only the level-set step is skipped.
InstanceDetail carrier_instance_detail(const MeasureModel& model,
                                       const std::vector<Dyadic>& members, std::size_t order,
                                       const TOptions& options);
TInstance carrier_instance(const MeasureModel& model, const std::vector<Dyadic>& members,
                           std::size_t order, const TOptions& options);

// Each candidate set of order n with 2^-n <= 1/(2p) yields one instance:
// M = its level-set members (partner-closed when partners are known), base packing of radius 2^-(n+1), eps = 2^-n.
TEstimate t_estimate(const MeasureModel& model, double alpha, const TOptions& options);

struct BoundComparison {
  double alpha = 0.0;
  double t_hat = 0.0;
  double ratio = 0.0;  // t_hat / alpha
  LegendreResult inf_all;       // q >= 0
  LegendreResult inf_from_one;  // q >= 1
  double olsen = 0.0;
  double improved = 0.0;
  bool bracketed = false;
  bool argmin_at_least_one = false;
  bool improvement = false;
};

BoundComparison compare_bounds(const ScalingCurve& curve, double alpha, double t_hat);

}  // namespace mfdim
