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

// Centered packings of closed balls, their weighted sums, the exact
// supremum over a finite candidate grid, and dyadic partition sums.

#include <cstddef>
#include <functional>
#include <vector>

#include "mfdim/dyadic.hpp"
#include "mfdim/measure.hpp"

namespace mfdim {

struct Ball {
  Dyadic center;
  Dyadic radius;
};

// Closed balls [c - r, c + r] are disjoint iff |c1 - c2| > r1 + r2.
bool balls_disjoint(const Ball& a, const Ball& b);

bool is_centered_packing(const std::vector<Ball>& balls,
                         const std::function<bool(const Dyadic&)>& in_carrier,
                         const Dyadic& epsilon);

// mass^q * (2r)^t with 0^q = +inf for q < 0 and 0^0 = 1.
long double packing_term(long double mass, long double two_r, double q, double t);

struct PackingValue {
  long double value = 0.0L;  // from enclosure midpoints
  long double lower = 0.0L;
  long double upper = 0.0L;
};

// Ball masses are resolved at order `depth`.
PackingValue packing_sum(const MeasureModel& model, const std::vector<Ball>& balls, double q,
                         double t, std::size_t depth);

inline constexpr std::size_t kExactPointBudget = 16;
inline constexpr std::size_t kExactRadiusBudget = 8;

struct PrepackingResult {
  long double value = 0.0L;
  std::vector<Ball> packing;  // in center order
};

// Maximum of the midpoint packing sum over every centered packing drawn from
// points x radii (radii above epsilon are skipped). Terms are added in
// center order. Throws DepthExceededError past the search budget.
PrepackingResult prepacking_sup_exact(const MeasureModel& model, const std::vector<Dyadic>& points,
                                      const Dyadic& epsilon, double q, double t,
                                      const std::vector<Dyadic>& radii, std::size_t depth);

// Largest-term-first greedy packing on the same candidates; never above the
// exact value.
PrepackingResult greedy_prepacking_estimate(const MeasureModel& model,
                                            const std::vector<Dyadic>& points,
                                            const Dyadic& epsilon, double q, double t,
                                            const std::vector<Dyadic>& radii, std::size_t depth);

// log2-domain running sum, rescaled when a much larger term arrives.
class Log2Accumulator {
 public:
  void add(long double log2_term);
  void merge(const Log2Accumulator& other) {
    if (!other.empty()) add(other.value());
  }
  long double value() const;  // -inf when empty
  bool empty() const { return sum_ == 0.0L; }

 private:
  long double ref_ = 0.0L;
  long double sum_ = 0.0L;
};

inline constexpr std::size_t kDefaultPartitionCap = 22;

// log2 S_n(q, 0) for every order n <= n_max and every q in `qs`.
class PartitionTable {
 public:
  PartitionTable(std::vector<double> qs, std::size_t n_max);

  const std::vector<double>& qs() const { return qs_; }
  std::size_t n_max() const { return n_max_; }
  // log2 S_n(q_i, t); +inf when a zero-mass interval meets q < 0.
  long double log2_sum(std::size_t n, std::size_t i, double t = 0.0) const;
  bool infinite(std::size_t n, std::size_t i) const { return inf_[n * qs_.size() + i]; }

  Log2Accumulator& cell(std::size_t n, std::size_t i) { return acc_[n * qs_.size() + i]; }
  void mark_infinite(std::size_t n, std::size_t i) { inf_[n * qs_.size() + i] = true; }
  void merge(const PartitionTable& other);

 private:
  std::vector<double> qs_;
  std::size_t n_max_;
  std::vector<Log2Accumulator> acc_;
  std::vector<bool> inf_;
};

// Zero-mass intervals are skipped for q >= 0. `threads` = 0 picks the
// hardware count; results do not depend on it.
PartitionTable partition_table(const MeasureModel& model, std::size_t n_max,
                               const std::vector<double>& qs, unsigned threads = 0,
                               std::size_t enumeration_cap = kDefaultPartitionCap);

struct PartitionSum {
  long double log2_value = 0.0L;
  bool infinite = false;
};

PartitionSum partition_sum(const MeasureModel& model, std::size_t n, double q, double t,
                           unsigned threads = 0,
                           std::size_t enumeration_cap = kDefaultPartitionCap);

}  // namespace mfdim
