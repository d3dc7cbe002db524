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

#include "mfdim/localdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "mfdim/error.hpp"

namespace mfdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_carrier(const std::vector<Dyadic>& sorted, const Dyadic& x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

std::vector<Dyadic> sorted_unique(std::vector<Dyadic> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

long double log2_ball_mass(const MeasureModel& model, const Ball& b, std::size_t depth) {
  const long double m = ball_mass_bounds(model, b.center, b.radius, depth).mid();
  return m > 0.0L ? std::log2(m) : -std::numeric_limits<long double>::infinity();
}

long double log2_diameter(const Ball& b) {
  const long double d = std::log2(2.0L * b.radius.to_long_double());
  if (!(d < 0.0L)) throw DomainError("base ball diameter must be below 1");
  return d;
}

double ratio_of(long double log2_mass, long double log2_two_r) {
  if (std::isinf(log2_mass)) return kInf;
  return static_cast<double>(log2_mass / log2_two_r);
}

// Smallest e with 2^-e <= x.
std::uint32_t floor_exponent(const Dyadic& x) {
  if (x.is_negative() || x.is_zero()) throw DomainError("expected a positive radius");
  std::uint32_t e = 0;
  while (Dyadic::pow2_neg(e) > x) ++e;
  return e;
}

}  // namespace

ExponentTrace exponent_trace(const MeasureModel& model, const Dyadic& x,
                             const std::vector<std::size_t>& depths) {
  ExponentTrace t;
  t.point = x.to_string();
  for (std::size_t n : depths) {
    if (n == 0) throw DomainError("exponent trace depths start at 1");
    const DyadicWord w = locate(x, n);
    t.samples.push_back(
        ExponentSample{n, static_cast<double>(-model.log2_mass(w) / static_cast<long double>(n))});
  }
  return t;
}

ExponentTrace exponent_trace_selected(const MeasureModel& model, const DyadicWord& start,
                                      const std::vector<std::size_t>& depths) {
  const SelectedFamily* fam = model.family();
  if (model.kind() != MeasureModel::Kind::kSelectedFamily || fam == nullptr) {
    throw DomainError("selected-path traces need the selected-family model");
  }
  if (!fam->is_selected(start)) throw DomainError("word '" + start.str() + "' is not selected");
  ExponentTrace t;
  t.point = start.str();
  DyadicWord cur = start;
  for (std::size_t n : depths) {
    if (n == 0) throw DomainError("exponent trace depths start at 1");
    while (cur.order() < n) cur = fam->sons(cur).front();
    const DyadicWord w = cur.prefix(n);
    t.samples.push_back(
        ExponentSample{n, static_cast<double>(-model.log2_mass(w) / static_cast<long double>(n))});
  }
  return t;
}

LevelSetSample level_set_sample(const MeasureModel& model, double alpha, double eta,
                                std::uint64_t p, std::size_t depth,
                                const std::vector<Dyadic>& candidates, double slack) {
  if (!(eta > alpha)) throw DomainError("level set needs eta > alpha");
  if (p == 0) throw DomainError("level set needs p >= 1");
  LevelSetSample s;
  s.alpha = alpha;
  s.eta = eta;
  s.p = p;
  s.depth = depth;
  const std::size_t res = std::min(model.depth_cap(), depth + kExtraResolution);
  for (const Dyadic& x : candidates) {
    bool ok = true;
    double proxy = -kInf;
    for (std::size_t m = 1; m <= depth; ++m) {
      const MassEnclosure e =
          ball_mass_bounds(model, x, Dyadic::pow2_neg(static_cast<std::uint32_t>(m)), res);
      // 2r < 1/p  <=>  p < 2^(m-1)
      const bool tested = m >= 65 || p < (std::uint64_t{1} << (m - 1));
      if (tested) {
        const long double need = static_cast<long double>(eta) * (1.0L - static_cast<long double>(m));
        if (!(e.lower > 0.0L) || std::log2(e.lower) < need) ok = false;
      }
      if (m >= 2 && 2 * m > depth) {
        const long double mid = e.mid();
        const double expo = mid > 0.0L ? static_cast<double>(std::log2(mid) / -static_cast<long double>(m)) : kInf;
        proxy = std::max(proxy, expo);
      }
    }
    if (proxy > alpha + slack) ok = false;
    s.passed.push_back(ok);
    s.limsup_proxy.push_back(proxy);
    if (ok) s.members.push_back(x);
  }
  return s;
}

const char* to_string(URule r) {
  return r == URule::kEpsilon ? "eps" : "sqrt-eps";
}

URule parse_u_rule(const std::string& text) {
  if (text == "eps") return URule::kEpsilon;
  if (text == "sqrt-eps") return URule::kSqrtEpsilon;
  throw UsageError("unknown u rule '" + text + "' (expected eps or sqrt-eps)");
}

Dyadic apply_u_rule(URule rule, const Dyadic& epsilon) {
  if (epsilon.is_negative() || epsilon.is_zero()) throw DomainError("epsilon must be positive");
  if (rule == URule::kEpsilon) return epsilon;
  const std::uint32_t e = floor_exponent(epsilon);
  return Dyadic::pow2_neg(e / 2);
}

bool is_pk_valid(const ReplacementFamily& family, const std::vector<Dyadic>& carrier,
                 const Dyadic& u, std::size_t k) {
  if (family.part.size() != family.balls.size() || family.parts > k) return false;
  const std::vector<Dyadic> pts = sorted_unique(carrier);
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    const Ball& b = family.balls[i];
    if (family.part[i] >= family.parts) return false;
    if (!in_carrier(pts, b.center)) return false;
    if (b.radius.is_negative() || b.radius.is_zero() || b.radius > u) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (family.part[j] == family.part[i] && !balls_disjoint(family.balls[j], b)) return false;
    }
  }
  return true;
}

double family_value(const MeasureModel& model, const std::vector<Ball>& base,
                    const ReplacementFamily& family, std::size_t depth) {
  if (family.balls.size() != base.size()) throw DomainError("family and base sizes differ");
  double v = -kInf;
  for (std::size_t i = 0; i < base.size(); ++i) {
    v = std::max(v, ratio_of(log2_ball_mass(model, family.balls[i], depth), log2_diameter(base[i])));
  }
  return v;
}

namespace {

struct Candidate {
  Ball ball;
  long double log2_mass;
};

class FamilySearch {
 public:
  FamilySearch(std::vector<Candidate> pool, std::vector<long double> denom, std::size_t k,
               std::uint64_t budget)
      : pool_(std::move(pool)), denom_(std::move(denom)), k_(k), budget_(budget) {
    const std::size_t c = pool_.size();
    clash_.assign(c * c, false);
    for (std::size_t a = 0; a < c; ++a) {
      for (std::size_t b = 0; b < c; ++b) {
        clash_[a * c + b] = !balls_disjoint(pool_[a].ball, pool_[b].ball);
      }
    }
    order_.resize(denom_.size());
    std::iota(order_.begin(), order_.end(), 0);
    // Largest base balls first: their ratios are hardest to push down.
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return denom_[a] > denom_[b]; });
  }

  double ratio(std::size_t index, std::size_t cand) const {
    return ratio_of(pool_[cand].log2_mass, denom_[index]);
  }

  // Assignments are (candidate, part) per index.
  struct Assignment {
    std::vector<std::size_t> cand;
    std::vector<std::size_t> part;
    double value = kInf;
  };

  Assignment greedy(const std::vector<std::size_t>& index_order) const {
    Assignment a;
    const std::size_t n = denom_.size();
    a.cand.assign(n, 0);
    a.part.assign(n, 0);
    std::vector<std::vector<std::size_t>> parts(k_);
    double v = -kInf;
    for (std::size_t i : index_order) {
      bool placed = false;
      for (std::size_t c = 0; c < pool_.size() && !placed; ++c) {
        for (std::size_t p = 0; p < k_; ++p) {
          if (fits(parts[p], c)) {
            parts[p].push_back(c);
            a.cand[i] = c;
            a.part[i] = p;
            v = std::max(v, ratio(i, c));
            placed = true;
            break;
          }
        }
      }
      if (!placed) return Assignment{};
    }
    a.value = v;
    return a;
  }

  // Exhaustive branch and bound below `best`; returns false when the node
  // budget ran out.
  bool exhaustive(Assignment& best) {
    cur_.cand.assign(denom_.size(), 0);
    cur_.part.assign(denom_.size(), 0);
    parts_.assign(k_, {});
    best_ = &best;
    aborted_ = false;
    visit(0, 0, -kInf);
    return !aborted_;
  }

  std::uint64_t nodes() const { return nodes_; }
  const Ball& ball(std::size_t c) const { return pool_[c].ball; }
  const std::vector<std::size_t>& index_order() const { return order_; }

 private:
  bool fits(const std::vector<std::size_t>& members, std::size_t c) const {
    const std::size_t n = pool_.size();
    for (std::size_t o : members) {
      if (clash_[o * n + c]) return false;
    }
    return true;
  }

  void visit(std::size_t depth, std::size_t used, double cur_max) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    if (depth == order_.size()) {
      best_->cand = cur_.cand;
      best_->part = cur_.part;
      best_->value = cur_max;
      return;
    }
    const std::size_t i = order_[depth];
    for (std::size_t c = 0; c < pool_.size(); ++c) {
      const double v = std::max(cur_max, ratio(i, c));
      // Candidates are sorted by decreasing mass, so ratios only grow.
      if (!(v < best_->value)) break;
      const std::size_t limit = std::min(used + 1, k_);
      for (std::size_t p = 0; p < limit; ++p) {
        if (!fits(parts_[p], c)) continue;
        parts_[p].push_back(c);
        cur_.cand[i] = c;
        cur_.part[i] = p;
        visit(depth + 1, std::max(used, p + 1), v);
        parts_[p].pop_back();
        if (aborted_ || !(v < best_->value)) break;
      }
      if (aborted_) return;
    }
  }

  std::vector<Candidate> pool_;
  std::vector<long double> denom_;
  std::size_t k_;
  std::uint64_t budget_;
  std::vector<bool> clash_;
  std::vector<std::size_t> order_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  Assignment cur_;
  std::vector<std::vector<std::size_t>> parts_;
  Assignment* best_ = nullptr;
};

ReplacementFamily to_family(const FamilySearch& s, const FamilySearch::Assignment& a) {
  ReplacementFamily f;
  for (std::size_t i = 0; i < a.cand.size(); ++i) {
    f.balls.push_back(s.ball(a.cand[i]));
    f.part.push_back(a.part[i]);
    f.parts = std::max(f.parts, a.part[i] + 1);
  }
  return f;
}

}  // namespace

LkResult lk_estimate(const MeasureModel& model, const std::vector<Dyadic>& carrier,
                     const std::vector<Ball>& base, const LkOptions& options) {
  if (options.k == 0 || options.k > kMaxParts) {
    throw DomainError("k must lie in 1.." + std::to_string(kMaxParts));
  }
  if (base.empty()) throw DomainError("base packing is empty");
  const std::vector<Dyadic> pts = sorted_unique(carrier);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!in_carrier(pts, base[i].center)) throw DomainError("base ball centered outside M");
    for (std::size_t j = 0; j < i; ++j) {
      if (!balls_disjoint(base[i], base[j])) throw DomainError("base balls are not disjoint");
    }
    if (base[i].radius > options.u) {
      throw InfeasibleError("base radius " + base[i].radius.to_string() +
                            " exceeds u; the base packing is not admissible");
    }
  }

  std::vector<long double> denom;
  for (const Ball& b : base) denom.push_back(log2_diameter(b));

  std::vector<Candidate> pool;
  for (const Dyadic& y : pts) {
    for (std::uint32_t j : options.radius_exponents) {
      const Dyadic r = Dyadic::pow2_neg(j);
      if (r > options.u) continue;
      const Ball b{y, r};
      pool.push_back(Candidate{b, log2_ball_mass(model, b, options.depth)});
    }
  }
  std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    return a.log2_mass > b.log2_mass;
  });

  LkResult r;
  r.family.balls = base;
  r.family.part.assign(base.size(), 0);
  r.family.parts = 1;
  r.base_value = family_value(model, base, r.family, options.depth);
  r.value = r.base_value;
  r.exhaustive = true;

  std::vector<ReplacementFamily> hints = options.hints;
  std::mt19937_64 rng(options.seed);
  for (std::size_t kk = 1; kk <= options.k; ++kk) {
    for (const ReplacementFamily& h : hints) {
      if (h.balls.size() != base.size() || !is_pk_valid(h, pts, options.u, kk)) continue;
      const double v = family_value(model, base, h, options.depth);
      if (v < r.value) {
        r.value = v;
        r.family = h;
      }
    }
    if (pool.empty()) continue;
    FamilySearch search(pool, denom, kk, options.node_budget);
    FamilySearch::Assignment best;
    std::vector<std::size_t> order = search.index_order();
    for (std::size_t t = 0; t <= options.restarts; ++t) {
      if (t > 0) std::shuffle(order.begin(), order.end(), rng);
      FamilySearch::Assignment a = search.greedy(order);
      if (a.value < best.value) best = a;
    }
    // Only improvements over the current best are worth exploring.
    FamilySearch::Assignment target = best;
    if (!(target.value < r.value)) {
      target = FamilySearch::Assignment{};
      target.value = r.value;
    }
    const bool done = search.exhaustive(target);
    r.nodes += search.nodes();
    if (!done) r.exhaustive = false;
    if (!target.cand.empty() && target.value < r.value) {
      r.value = target.value;
      r.family = to_family(search, target);
    }
    hints.push_back(r.family);
  }
  return r;
}

WitnessResult partner_witness(const MeasureModel& model, const std::vector<Dyadic>& carrier,
                            const std::vector<Ball>& base, const Dyadic& u, std::size_t depth) {
  const SelectedFamily* fam = model.family();
  if (model.kind() != MeasureModel::Kind::kSelectedFamily || fam == nullptr) {
    throw DomainError("the witness family needs the selected-family model");
  }
  const std::vector<Dyadic> pts = sorted_unique(carrier);
  const TypeWindows& win = fam->params().windows;
  const std::size_t cap = fam->params().order_cap;
  WitnessResult w;
  for (const Ball& b : base) {
    const Dyadic lo = b.center - b.radius;
    const Dyadic hi = b.center + b.radius;
    std::optional<DyadicWord> enclosed;
    for (std::size_t n = fam->params().n0; n <= cap; n += 6) {
      const DyadicWord cand = locate(b.center, n);
      const DyadicInterval iv = interval_of(cand);
      if (iv.left() >= lo && iv.right() <= hi && fam->is_selected(cand)) {
        enclosed = cand;
        break;
      }
      if (Dyadic::pow2_neg(static_cast<std::uint32_t>(n)) < b.radius.scaled_pow2(-8)) break;
    }
    if (!enclosed) {
      throw DomainError("no selected interval around " + b.center.to_string() +
                        " fits inside its ball");
    }
    const std::size_t n = enclosed->order();
    if (type_of(*enclosed, win) == IntervalType::kType1) {
      w.family.balls.push_back(b);
      w.family.part.push_back(0);
      ++w.kept;
      continue;
    }
    const DyadicWord mate = fam->partner(*enclosed);
    if (type_of(mate, win) != IntervalType::kType1) w.partners_type1 = false;
    const auto it = std::find_if(pts.begin(), pts.end(),
                                 [&](const Dyadic& y) { return locate(y, n) == mate; });
    if (it == pts.end()) {
      // Partner point not in M: keep the ball and mark the family invalid.
      w.partners_in_carrier = false;
      w.family.balls.push_back(b);
      w.family.part.push_back(0);
      ++w.kept;
      continue;
    }
    w.family.balls.push_back(Ball{*it, Dyadic::pow2_neg(static_cast<std::uint32_t>(n))});
    w.family.part.push_back(1);
    ++w.moved;
  }
  w.family.parts = w.moved > 0 ? 2 : 1;
  if (w.kept == 0 && w.moved > 0) {
    for (auto& p : w.family.part) p = 0;
    w.family.parts = 1;
  }
  w.value = family_value(model, base, w.family, depth);
  w.valid = w.partners_in_carrier && is_pk_valid(w.family, pts, u, 2);
  return w;
}

std::vector<CandidateSet> selected_candidate_sets(const SelectedFamily& family,
                                                  std::size_t first_generation) {
  std::vector<CandidateSet> out;
  for (std::size_t k = first_generation; k < family.generation_count(); ++k) {
    CandidateSet s;
    s.order = family.generation_order(k);
    std::vector<DyadicWord> words;
    for (const Member& m : family.generation(k)) words.push_back(m.word);
    std::sort(words.begin(), words.end());
    for (const DyadicWord& w : words) {
      s.points.push_back(interval_of(w).midpoint());
      const DyadicWord mate = family.partner(w);
      s.partner.push_back(std::find(words.begin(), words.end(), mate) - words.begin());
    }
    out.push_back(std::move(s));
  }
  return out;
}

CandidateSet dyadic_candidate_set(std::size_t order, std::size_t stride, std::size_t limit) {
  if (stride < 2) throw DomainError("candidate stride must be at least 2");
  CandidateSet s;
  s.order = order;
  const BigInt count = BigInt(1) << order;
  for (BigInt j = 0; j < count && s.points.size() < limit; j += stride) {
    s.points.push_back(DyadicInterval(j, static_cast<std::uint32_t>(order)).midpoint());
  }
  return s;
}

InstanceDetail carrier_instance_detail(const MeasureModel& model,
                                       const std::vector<Dyadic>& members, std::size_t order,
                                       const TOptions& options) {
  if (members.empty()) throw DomainError("carrier has no points");
  const auto n = static_cast<std::uint32_t>(order);
  std::vector<Ball> base;
  const Dyadic r = Dyadic::pow2_neg(n + 1);
  for (const Dyadic& x : members) {
    const Ball b{x, r};
    if (base.empty() || balls_disjoint(base.back(), b)) base.push_back(b);
  }
  const Dyadic eps = Dyadic::pow2_neg(n);
  LkOptions lo;
  lo.k = options.k;
  lo.u = apply_u_rule(options.u_rule, eps);
  for (std::uint32_t j = floor_exponent(lo.u); j <= n + 2; ++j) lo.radius_exponents.push_back(j);
  lo.depth = std::min(model.depth_cap(), order + 1 + kExtraResolution);
  lo.node_budget = options.node_budget;
  lo.restarts = options.restarts;
  lo.seed = options.seed;
  InstanceDetail d;
  TInstance& inst = d.instance;
  inst.order = order;
  inst.members = members.size();
  if (model.kind() == MeasureModel::Kind::kSelectedFamily) {
    d.witness = partner_witness(model, members, base, lo.u, lo.depth);
    inst.has_witness = true;
    inst.witness_value = d.witness.value;
    inst.witness_valid = d.witness.valid && d.witness.partners_type1;
    if (d.witness.valid) lo.hints.push_back(d.witness.family);
  }
  d.search = lk_estimate(model, members, base, lo);
  inst.base_value = d.search.base_value;
  inst.lk_value = d.search.value;
  inst.exhaustive = d.search.exhaustive;
  inst.l_value = d.search.value;
  if (inst.has_witness && inst.witness_valid) inst.l_value = std::min(inst.l_value, inst.witness_value);
  return d;
}

TInstance carrier_instance(const MeasureModel& model, const std::vector<Dyadic>& members,
                           std::size_t order, const TOptions& options) {
  return carrier_instance_detail(model, members, order, options).instance;
}

TEstimate t_estimate(const MeasureModel& model, double alpha, const TOptions& options) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  TEstimate est;
  est.alpha = alpha;
  for (double eta : options.etas) {
    if (!(eta > alpha)) throw DomainError("every eta must exceed alpha");
    for (std::uint64_t p : options.ps) {
      TRow row;
      row.eta = eta;
      row.p = p;
      for (const CandidateSet& set : options.candidates) {
        const auto n = static_cast<std::uint32_t>(set.order);
        // eps = 2^-n must stay at or below 1/(2p).
        if (n < 1 || (n < 64 && p > (std::uint64_t{1} << (n - 1)))) continue;
        const LevelSetSample ls =
            level_set_sample(model, alpha, eta, p, set.order + 1, set.points, options.slack);
        std::vector<Dyadic> members;
        for (std::size_t i = 0; i < set.points.size(); ++i) {
          if (!ls.passed[i]) continue;
          if (!set.partner.empty() &&
              (set.partner[i] < 0 || !ls.passed[static_cast<std::size_t>(set.partner[i])])) {
            continue;
          }
          members.push_back(set.points[i]);
        }
        if (members.empty()) continue;
        const TInstance inst = carrier_instance(model, members, set.order, options);
        if (!row.defined) {
          row.t_hat = inst.l_value;
          row.witness_bound = inst.has_witness ? inst.witness_value : 0.0;
        } else {
          row.t_hat = std::max(row.t_hat, inst.l_value);
          if (inst.has_witness) row.witness_bound = std::max(row.witness_bound, inst.witness_value);
        }
        row.defined = true;
        row.instances.push_back(inst);
      }
      est.rows.push_back(std::move(row));
    }
  }
  return est;
}

BoundComparison compare_bounds(const ScalingCurve& curve, double alpha, double t_hat) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  BoundComparison c;
  c.alpha = alpha;
  c.t_hat = t_hat;
  c.ratio = t_hat / alpha;
  c.inf_all = legendre_inf(curve, alpha, 0.0);
  c.inf_from_one = legendre_inf(curve, alpha, 1.0);
  c.olsen = c.inf_all.value;
  c.improved = c.ratio * c.inf_from_one.value;
  c.bracketed = c.inf_all.bracketed && c.inf_from_one.bracketed;
  c.argmin_at_least_one = c.inf_all.argmin >= 1.0;
  c.improvement = c.bracketed && c.improved < c.olsen;
  return c;
}

}  // namespace mfdim
