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

#include "mfdim/packing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <mutex>
#include <thread>

#include "mfdim/error.hpp"

namespace mfdim {

namespace {

constexpr long double kInf = std::numeric_limits<long double>::infinity();

long double term_of(const MeasureModel& model, const Ball& b, double q, double t,
                    std::size_t depth) {
  const MassEnclosure e = ball_mass_bounds(model, b.center, b.radius, depth);
  return packing_term(e.mid(), 2.0L * b.radius.to_long_double(), q, t);
}

void check_budget(const std::vector<Dyadic>& points, const std::vector<Dyadic>& radii) {
  if (points.size() > kExactPointBudget || radii.size() > kExactRadiusBudget) {
    throw DepthExceededError("exact prepacking budget is " + std::to_string(kExactPointBudget) +
                             " points x " + std::to_string(kExactRadiusBudget) +
                             " radii; got " + std::to_string(points.size()) + " x " +
                             std::to_string(radii.size()));
  }
}

std::vector<Dyadic> sorted_points(std::vector<Dyadic> points) {
  std::sort(points.begin(), points.end());
  if (std::adjacent_find(points.begin(), points.end()) != points.end()) {
    throw DomainError("carrier points must be distinct");
  }
  return points;
}

std::vector<Dyadic> admissible_radii(const std::vector<Dyadic>& radii, const Dyadic& epsilon) {
  std::vector<Dyadic> out;
  for (const Dyadic& r : radii) {
    if (r.is_negative() || r.is_zero()) throw DomainError("radii must be positive");
    if (r <= epsilon) out.push_back(r);
  }
  return out;
}

}  // namespace

bool balls_disjoint(const Ball& a, const Ball& b) {
  return (a.center - b.center).abs() > a.radius + b.radius;
}

bool is_centered_packing(const std::vector<Ball>& balls,
                         const std::function<bool(const Dyadic&)>& in_carrier,
                         const Dyadic& epsilon) {
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const Ball& b = balls[i];
    if (!in_carrier(b.center)) return false;
    if (b.radius.is_negative() || b.radius.is_zero() || b.radius > epsilon) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (!balls_disjoint(balls[j], b)) return false;
    }
  }
  return true;
}

long double packing_term(long double mass, long double two_r, double q, double t) {
  long double m_part;
  if (mass > 0.0L) {
    m_part = std::pow(mass, static_cast<long double>(q));
  } else if (q < 0.0) {
    return kInf;
  } else {
    m_part = q == 0.0 ? 1.0L : 0.0L;
  }
  return m_part * std::pow(two_r, static_cast<long double>(t));
}

PackingValue packing_sum(const MeasureModel& model, const std::vector<Ball>& balls, double q,
                         double t, std::size_t depth) {
  PackingValue v;
  for (const Ball& b : balls) {
    const MassEnclosure e = ball_mass_bounds(model, b.center, b.radius, depth);
    const long double two_r = 2.0L * b.radius.to_long_double();
    const long double at_lo = packing_term(e.lower, two_r, q, t);
    const long double at_hi = packing_term(e.upper, two_r, q, t);
    v.value += packing_term(e.mid(), two_r, q, t);
    v.lower += std::min(at_lo, at_hi);
    v.upper += std::max(at_lo, at_hi);
  }
  return v;
}

PrepackingResult prepacking_sup_exact(const MeasureModel& model, const std::vector<Dyadic>& points,
                                      const Dyadic& epsilon, double q, double t,
                                      const std::vector<Dyadic>& radii, std::size_t depth) {
  check_budget(points, radii);
  const std::vector<Dyadic> xs = sorted_points(points);
  const std::vector<Dyadic> rs = admissible_radii(radii, epsilon);
  const std::size_t n = xs.size();
  const std::size_t k = rs.size();

  // best[i*k + a]: largest sum of a packing whose rightmost ball is (x_i, r_a).
  // On a line, disjointness of neighbours implies pairwise disjointness.
  std::vector<long double> best(n * k);
  std::vector<std::ptrdiff_t> from(n * k, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      const Ball cur{xs[i], rs[a]};
      long double prior = 0.0L;
      std::ptrdiff_t arg = -1;
      for (std::size_t j = 0; j < i; ++j) {
        for (std::size_t c = 0; c < k; ++c) {
          const std::size_t s = j * k + c;
          if (best[s] > prior && balls_disjoint(Ball{xs[j], rs[c]}, cur)) {
            prior = best[s];
            arg = static_cast<std::ptrdiff_t>(s);
          }
        }
      }
      best[i * k + a] = prior + term_of(model, cur, q, t, depth);
      from[i * k + a] = arg;
    }
  }
  PrepackingResult r;
  std::ptrdiff_t end = -1;
  for (std::size_t s = 0; s < best.size(); ++s) {
    if (best[s] > r.value) {
      r.value = best[s];
      end = static_cast<std::ptrdiff_t>(s);
    }
  }
  for (std::ptrdiff_t s = end; s >= 0; s = from[s]) {
    r.packing.push_back(Ball{xs[s / k], rs[s % k]});
  }
  std::reverse(r.packing.begin(), r.packing.end());
  return r;
}

PrepackingResult greedy_prepacking_estimate(const MeasureModel& model,
                                            const std::vector<Dyadic>& points,
                                            const Dyadic& epsilon, double q, double t,
                                            const std::vector<Dyadic>& radii, std::size_t depth) {
  const std::vector<Dyadic> xs = sorted_points(points);
  const std::vector<Dyadic> rs = admissible_radii(radii, epsilon);
  struct Candidate {
    Ball ball;
    long double term;
    std::size_t order;
  };
  std::vector<Candidate> pool;
  for (const Dyadic& x : xs) {
    for (const Dyadic& r : rs) {
      Ball b{x, r};
      pool.push_back(Candidate{b, term_of(model, b, q, t, depth), pool.size()});
    }
  }
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& a, const Candidate& b) { return a.term > b.term; });
  std::vector<Candidate> chosen;
  for (const Candidate& c : pool) {
    if (!(c.term > 0.0L)) continue;
    const bool fits = std::all_of(chosen.begin(), chosen.end(), [&](const Candidate& o) {
      return balls_disjoint(o.ball, c.ball);
    });
    if (fits) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& a, const Candidate& b) { return a.order < b.order; });
  PrepackingResult r;
  for (const Candidate& c : chosen) {
    r.value += c.term;
    r.packing.push_back(c.ball);
  }
  return r;
}

void Log2Accumulator::add(long double x) {
  if (x == -kInf) return;
  if (sum_ == 0.0L) {
    ref_ = x;
    sum_ = 1.0L;
    return;
  }
  const long double d = x - ref_;
  if (d > 512.0L) {
    sum_ = sum_ * std::exp2(-d) + 1.0L;
    ref_ = x;
  } else {
    sum_ += std::exp2(d);
  }
}

long double Log2Accumulator::value() const {
  return sum_ == 0.0L ? -kInf : ref_ + std::log2(sum_);
}

PartitionTable::PartitionTable(std::vector<double> qs, std::size_t n_max)
    : qs_(std::move(qs)), n_max_(n_max), acc_((n_max + 1) * qs_.size()),
      inf_((n_max + 1) * qs_.size(), false) {}

long double PartitionTable::log2_sum(std::size_t n, std::size_t i, double t) const {
  if (n > n_max_ || i >= qs_.size()) throw DomainError("partition table index out of range");
  if (infinite(n, i)) return kInf;
  return acc_[n * qs_.size() + i].value() - static_cast<long double>(n) * t;
}

void PartitionTable::merge(const PartitionTable& other) {
  for (std::size_t c = 0; c < acc_.size(); ++c) {
    acc_[c].merge(other.acc_[c]);
    if (other.inf_[c]) inf_[c] = true;
  }
}

namespace {

struct TableWalker {
  const MeasureModel& model;
  PartitionTable& table;

  void zero_mass(std::size_t from_order) {
    const auto& qs = table.qs();
    for (std::size_t m = from_order; m <= table.n_max(); ++m) {
      for (std::size_t i = 0; i < qs.size(); ++i) {
        if (qs[i] < 0.0) table.mark_infinite(m, i);
      }
    }
  }

  // 2^free intervals of order m, each of mass 2^lg.
  void add(std::size_t m, long double lg, std::size_t free) {
    const auto& qs = table.qs();
    for (std::size_t i = 0; i < qs.size(); ++i) {
      table.cell(m, i).add(static_cast<long double>(free) + static_cast<long double>(qs[i]) * lg);
    }
  }

  void walk(const DyadicWord& w, long double lg) {
    const std::size_t m = w.order();
    if (lg == -kInf) {
      zero_mass(m);
      return;
    }
    add(m, lg, 0);
    if (m == table.n_max()) return;
    if (model.uniform_below(w)) {
      for (std::size_t k = 1; m + k <= table.n_max(); ++k) {
        add(m + k, lg - static_cast<long double>(k), k);
      }
      return;
    }
    const auto split = model.log2_split(w);
    for (int b = 0; b < 2; ++b) walk(w.child(b), lg + split[b]);
  }
};

}  // namespace

PartitionTable partition_table(const MeasureModel& model, std::size_t n_max,
                               const std::vector<double>& qs, unsigned threads,
                               std::size_t enumeration_cap) {
  if (n_max > enumeration_cap) {
    throw DepthExceededError("partition order " + std::to_string(n_max) +
                             " exceeds the enumeration cap " + std::to_string(enumeration_cap));
  }
  if (n_max > model.depth_cap()) {
    throw DepthExceededError("partition order " + std::to_string(n_max) +
                             " exceeds the depth cap of " + model.describe());
  }
  // Orders below the split depth are walked here; the subtrees at the split
  // depth are walked independently and merged in index order.
  const std::size_t split = std::min<std::size_t>(n_max, 8);
  PartitionTable top(qs, n_max);
  struct Frontier {
    DyadicWord word;
    long double lg;
  };
  std::vector<Frontier> frontier;
  {
    TableWalker tw{model, top};
    std::function<void(const DyadicWord&, long double)> descend =
        [&](const DyadicWord& w, long double lg) {
          if (w.order() == split && lg != -kInf) {
            frontier.push_back(Frontier{w, lg});
            return;
          }
          if (lg == -kInf) {
            tw.zero_mass(w.order());
            return;
          }
          tw.add(w.order(), lg, 0);
          if (model.uniform_below(w)) {
            for (std::size_t k = 1; w.order() + k <= n_max; ++k) {
              tw.add(w.order() + k, lg - static_cast<long double>(k), k);
            }
            return;
          }
          const auto s = model.log2_split(w);
          for (int b = 0; b < 2; ++b) descend(w.child(b), lg + s[b]);
        };
    descend(DyadicWord(), 0.0L);
  }

  std::vector<PartitionTable> parts(frontier.size(), PartitionTable(qs, n_max));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < frontier.size(); i = next++) {
      TableWalker tw{model, parts[i]};
      tw.walk(frontier[i].word, frontier[i].lg);
    }
  };
  unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  count = static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(frontier.size(), 1)));
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned i = 1; i < count; ++i) {
    pool.emplace_back([&] {
      try {
        work();
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  try {
    work();
  } catch (...) {
    std::lock_guard lock(failure_mu);
    if (!failure) failure = std::current_exception();
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const PartitionTable& p : parts) top.merge(p);
  return top;
}

PartitionSum partition_sum(const MeasureModel& model, std::size_t n, double q, double t,
                           unsigned threads, std::size_t enumeration_cap) {
  const PartitionTable table = partition_table(model, n, {q}, threads, enumeration_cap);
  PartitionSum s;
  s.infinite = table.infinite(n, 0);
  s.log2_value = table.log2_sum(n, 0, t);
  return s;
}

}  // namespace mfdim
