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

#include "mfdim/construction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "mfdim/error.hpp"

namespace mfdim {

namespace {

// Child positions inside a father keep a gap of more than one child length
// to both father endpoints.
constexpr unsigned kFirstChild = 2;
constexpr unsigned kLastChild = 61;
// Same-generation siblings: index gap of at least 4 means a gap of more than
// two interval lengths.
constexpr unsigned kSiblingIndexGap = 4;

std::optional<std::uint64_t> next_entry(const Growth& growth, std::uint64_t n0, std::size_t p,
                                        std::uint64_t current) {
  auto mul = [](std::uint64_t a, std::uint64_t b) -> std::optional<std::uint64_t> {
    if (a != 0 && b > UINT64_MAX / a) return std::nullopt;
    return a * b;
  };
  switch (growth.mode) {
    case Growth::Mode::kTower:
      if (p % 3 == 0) {
        if (current >= 63) return std::nullopt;
        return mul(std::uint64_t{1} << current, n0);
      }
      return mul(current, 2);
    case Growth::Mode::kGeometric:
      return mul(current, growth.arg);
    case Growth::Mode::kAffine:
      if (current > UINT64_MAX - growth.arg) return std::nullopt;
      return current + growth.arg;
  }
  return std::nullopt;
}

DyadicWord block(unsigned c) { return DyadicWord::from_index(BigInt(c), 6); }

// Words of one type and order in lexicographic order.
class TypedWordStream {
 public:
  TypedWordStream(const TypeWindows& windows, std::size_t n, IntervalType t) {
    for (std::size_t z = 0; z <= n; ++z) {
      if (windows.in_window(z, n, t)) heads_.push_back(std::string(z, '0') + std::string(n - z, '1'));
    }
    live_.assign(heads_.size(), true);
  }

  std::optional<DyadicWord> next() {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      if (live_[i] && (!best || heads_[i] < heads_[*best])) best = i;
    }
    if (!best) return std::nullopt;
    DyadicWord out(heads_[*best]);
    live_[*best] = std::next_permutation(heads_[*best].begin(), heads_[*best].end());
    return out;
  }

 private:
  std::vector<std::string> heads_;
  std::vector<bool> live_;
};

bool separated_same_order(const DyadicWord& a, const DyadicWord& b) {
  const BigInt ia = a.index();
  const BigInt ib = b.index();
  const BigInt d = ia > ib ? BigInt(ia - ib) : BigInt(ib - ia);
  return d >= kSiblingIndexGap;
}

}  // namespace

Growth Growth::parse(std::string_view text) {
  auto arg_of = [&](std::string_view head) -> std::uint64_t {
    std::string_view rest = text.substr(head.size());
    if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') {
      throw UsageError("growth '" + std::string(text) + "': expected " + std::string(head) + "(N)");
    }
    const std::string digits(rest.substr(1, rest.size() - 2));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("growth '" + std::string(text) + "': argument must be a positive integer");
    }
    return std::stoull(digits);
  };
  Growth g;
  if (text == "tower") {
    g.mode = Mode::kTower;
    g.arg = 0;
  } else if (text.starts_with("geometric")) {
    g.mode = Mode::kGeometric;
    g.arg = arg_of("geometric");
  } else if (text.starts_with("affine")) {
    g.mode = Mode::kAffine;
    g.arg = arg_of("affine");
  } else {
    throw UsageError("unknown growth mode '" + std::string(text) + "'");
  }
  return g;
}

std::string Growth::to_string() const {
  switch (mode) {
    case Mode::kTower: return "tower";
    case Mode::kGeometric: return "geometric(" + std::to_string(arg) + ")";
    case Mode::kAffine: return "affine(" + std::to_string(arg) + ")";
  }
  return "?";
}

double exponent_map(double x, double p0, double p1) {
  return -(x * std::log(p0 / p1) + std::log(p1)) / std::log(2.0);
}

double ConstructionParams::g(double x) const { return exponent_map(x, p0, p1); }

Schedule::Phase Schedule::phase_of(std::uint64_t order) const {
  if (orders_.empty() || order < orders_.front()) {
    throw DomainError("order " + std::to_string(order) + " precedes the schedule");
  }
  if (order > cap_) {
    throw DepthExceededError("order " + std::to_string(order) + " exceeds the order cap " +
                             std::to_string(cap_));
  }
  const auto it = std::upper_bound(orders_.begin(), orders_.end(), order);
  const std::size_t p = static_cast<std::size_t>(it - orders_.begin()) - 1;
  Phase ph;
  ph.index = p;
  ph.rule = static_cast<int>(p % 3) + 1;
  ph.start = orders_[p];
  if (p > 0) ph.previous = orders_[p - 1];
  if (p + 1 < orders_.size()) {
    ph.next = orders_[p + 1];
  } else {
    ph.next = next_beyond_;
  }
  return ph;
}

Schedule schedule(const ConstructionParams& params, std::size_t count) {
  if (count == 0) throw DomainError("schedule: count must be at least 1");
  if (params.n0 > params.order_cap) {
    throw CappedScheduleError("schedule: n0 exceeds the order cap", 0);
  }
  std::vector<std::uint64_t> orders{params.n0};
  while (orders.size() < count) {
    const std::size_t p = orders.size() - 1;
    const auto nx = next_entry(params.growth, params.n0, p, orders.back());
    if (!nx || *nx > params.order_cap) {
      std::ostringstream os;
      os << "schedule: n_" << (p + 1) << " ";
      if (nx) {
        os << "= " << *nx;
      } else {
        os << "does not fit in 64 bits and";
      }
      os << " exceeds the order cap " << params.order_cap << "; last entry n_" << p << " = "
         << orders.back();
      throw CappedScheduleError(os.str(), orders.back());
    }
    orders.push_back(*nx);
  }
  return Schedule(std::move(orders), std::nullopt, params.order_cap);
}

Schedule schedule_to_cap(const ConstructionParams& params) {
  std::vector<std::uint64_t> orders{params.n0};
  std::optional<std::uint64_t> beyond;
  for (;;) {
    const std::size_t p = orders.size() - 1;
    const auto nx = next_entry(params.growth, params.n0, p, orders.back());
    if (!nx || *nx <= orders.back()) break;
    if (*nx > params.order_cap) {
      beyond = nx;
      break;
    }
    orders.push_back(*nx);
  }
  return Schedule(std::move(orders), beyond, params.order_cap);
}

std::array<DyadicWord, 2> seed_generation(const ConstructionParams& params) {
  const std::size_t n = params.n0;
  TypedWordStream first(params.windows, n, IntervalType::kType1);
  constexpr std::size_t kScanLimit = 1u << 20;
  for (std::size_t i = 0; i < kScanLimit; ++i) {
    const auto w1 = first.next();
    if (!w1) break;
    TypedWordStream second(params.windows, n, IntervalType::kType2);
    for (std::size_t j = 0; j < kScanLimit; ++j) {
      const auto w2 = second.next();
      if (!w2) break;
      if (separated_same_order(*w1, *w2)) return {*w1, *w2};
    }
  }
  throw InfeasibleError("seed_generation: no separated (type 1, type 2) pair at order n0 = " +
                        std::to_string(n));
}

struct SelectedFamily::Memo {
  mutable std::shared_mutex mu;
  std::unordered_map<DyadicWord, std::vector<DyadicWord>, DyadicWordHash> sons;
};

SelectedFamily::SelectedFamily(ConstructionParams params)
    : params_(std::move(params)), memo_(std::make_unique<Memo>()) {
  if (params_.n0 == 0 || params_.n0 % 6 != 0) {
    throw DomainError("n0 must be a positive multiple of 6");
  }
  if (params_.n0 > params_.order_cap) throw DepthExceededError("n0 exceeds the order cap");
  schedule_ = schedule_to_cap(params_);
  seeds_ = seed_generation(params_);
  std::vector<Member> g0;
  g0.push_back(Member{seeds_[0], 0, 0, IntervalType::kType1});
  g0.push_back(Member{seeds_[1], 1, 0, IntervalType::kType2});
  generations_.push_back(std::move(g0));
}

SelectedFamily::~SelectedFamily() = default;
SelectedFamily::SelectedFamily(SelectedFamily&&) noexcept = default;
SelectedFamily& SelectedFamily::operator=(SelectedFamily&&) noexcept = default;

std::shared_ptr<const SelectedFamily> SelectedFamily::build(const ConstructionParams& params,
                                                            std::size_t generations) {
  auto family = std::make_shared<SelectedFamily>(params);
  while (family->generation_count() < generations) family->build_next_generation();
  return family;
}

void SelectedFamily::check_order(std::uint64_t order) const {
  if (order > params_.order_cap) {
    throw DepthExceededError("order " + std::to_string(order) + " exceeds the order cap " +
                             std::to_string(params_.order_cap));
  }
}

std::optional<std::size_t> SelectedFamily::generation_index_of_order(std::uint64_t order) const {
  if (order < params_.n0 || (order - params_.n0) % 6 != 0) return std::nullopt;
  return static_cast<std::size_t>((order - params_.n0) / 6);
}

std::vector<DyadicWord> SelectedFamily::sons(const DyadicWord& father) const {
  {
    std::shared_lock lock(memo_->mu);
    const auto it = memo_->sons.find(father);
    if (it != memo_->sons.end()) return it->second;
  }
  const std::uint64_t n = father.order();
  if (!generation_index_of_order(n)) {
    throw DomainError("sons: order " + std::to_string(n) + " is not a generation order");
  }
  check_order(n + 6);
  const TypeWindows& win = params_.windows;
  const Schedule::Phase phase = schedule_.phase_of(n);
  const IntervalType father_type = type_of(father, win);

  bool steer = false;
  IntervalType target_type = IntervalType::kType1;
  if (phase.rule == 2) {
    steer = type_of(father.prefix(phase.start), win) != IntervalType::kType1;
    target_type = IntervalType::kType1;
  } else if (phase.rule == 3) {
    steer = type_of(father.prefix(*phase.previous), win) == IntervalType::kType1;
    target_type = IntervalType::kType2;
  }

  auto infeasible = [&](const std::string& why) {
    return InfeasibleError("no admissible son for father " + father.str() + " (order " +
                           std::to_string(n) + ", rule " + std::to_string(phase.rule) + "): " + why);
  };

  std::vector<DyadicWord> out;
  if (!steer) {
    if (father_type == IntervalType::kUntyped ||
        (phase.rule != 1 && father_type != IntervalType::kType1)) {
      throw infeasible(std::string("father is ") + to_string(father_type));
    }
    const std::size_t wanted = phase.rule == 1 ? 2 : 1;
    std::optional<unsigned> last;
    for (unsigned c = kFirstChild; c <= kLastChild && out.size() < wanted; ++c) {
      if (last && c < *last + kSiblingIndexGap) continue;
      DyadicWord child = father.extended(block(c));
      if (type_of(child, win) != father_type) continue;
      out.push_back(std::move(child));
      last = c;
    }
    if (out.size() < wanted) throw infeasible("same-type pool exhausted under separation");
  } else {
    if (!phase.next) throw infeasible("steering target order is not representable");
    const std::uint64_t target = *phase.next;
    for (unsigned c = kFirstChild; c <= kLastChild; ++c) {
      DyadicWord child = father.extended(block(c));
      const std::size_t z = child.zero_count();
      const double ratio = static_cast<double>(z) / static_cast<double>(child.order());
      if (!(win.beta1 < ratio && ratio < win.gamma2)) continue;
      // Later blocks obey the same endpoint margins: 1..5 zeros per block.
      if (!reachable_in_blocks(z, child.order(), target, 6, 1, 5, target_type, win)) continue;
      out.push_back(std::move(child));
      break;
    }
    if (out.empty()) {
      throw infeasible(std::string("no child can reach ") + to_string(target_type) +
                       " at order " + std::to_string(target));
    }
  }

  std::unique_lock lock(memo_->mu);
  memo_->sons.try_emplace(father, out);
  return out;
}

void SelectedFamily::build_next_generation() {
  const std::vector<Member>& last = generations_.back();
  const std::uint64_t order = generation_order(generations_.size());
  check_order(order);
  std::vector<Member> next;
  std::optional<std::size_t> per_father;
  for (const Member& m : last) {
    const std::vector<DyadicWord> s = sons(m.word);
    if (per_father && *per_father != s.size()) {
      throw InfeasibleError("fathers of generation " + std::to_string(generations_.size() - 1) +
                            " disagree on the number of sons");
    }
    per_father = s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      next.push_back(Member{s[i], m.lineage, m.pair * s.size() + i, type_of(s[i], params_.windows)});
    }
  }
  std::vector<BigInt> idx;
  idx.reserve(next.size());
  for (const Member& m : next) idx.push_back(m.word.index());
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] - idx[i - 1] < kSiblingIndexGap) {
      throw InfeasibleError("generation " + std::to_string(generations_.size()) +
                            " violates the same-generation separation");
    }
  }
  generations_.push_back(std::move(next));
}

bool SelectedFamily::is_selected(const DyadicWord& word) const {
  const std::uint64_t n = word.order();
  check_order(n);
  const auto k = generation_index_of_order(n);
  if (!k) return false;
  const DyadicWord root = word.prefix(params_.n0);
  if (root != seeds_[0] && root != seeds_[1]) return false;
  DyadicWord cur = root;
  for (std::size_t j = 1; j <= *k; ++j) {
    const DyadicWord step = word.prefix(params_.n0 + 6 * j);
    const auto s = sons(cur);
    if (std::find(s.begin(), s.end(), step) == s.end()) return false;
    cur = step;
  }
  return true;
}

std::size_t SelectedFamily::selected_prefix_depth(const DyadicWord& word) const {
  const std::size_t m = word.order();
  check_order(m);
  std::size_t best = std::max(word.common_prefix_length(seeds_[0]),
                              word.common_prefix_length(seeds_[1]));
  if (best < params_.n0 || m <= params_.n0) return std::min(best, m);
  DyadicWord cur = word.prefix(params_.n0);
  for (;;) {
    const std::size_t next_order = cur.order() + 6;
    std::size_t reach = cur.order();
    for (const DyadicWord& s : sons(cur)) reach = std::max(reach, word.common_prefix_length(s));
    if (reach < next_order || m <= next_order) return std::min(reach, m);
    cur = word.prefix(next_order);
  }
}

bool SelectedFamily::contains_selected(const DyadicWord& word) const {
  return selected_prefix_depth(word) == word.order();
}

int SelectedFamily::lineage_of(const DyadicWord& word) const {
  if (seeds_[0].is_prefix_of(word)) return 0;
  if (seeds_[1].is_prefix_of(word)) return 1;
  return -1;
}

std::vector<std::size_t> SelectedFamily::son_path(const DyadicWord& word) const {
  if (!is_selected(word)) throw DomainError("word '" + word.str() + "' is not selected");
  std::vector<std::size_t> path;
  path.push_back(static_cast<std::size_t>(lineage_of(word)));
  DyadicWord cur = word.prefix(params_.n0);
  for (std::uint64_t o = params_.n0 + 6; o <= word.order(); o += 6) {
    const DyadicWord step = word.prefix(o);
    const auto s = sons(cur);
    path.push_back(static_cast<std::size_t>(std::find(s.begin(), s.end(), step) - s.begin()));
    cur = step;
  }
  return path;
}

DyadicWord SelectedFamily::partner(const DyadicWord& word) const {
  const std::vector<std::size_t> path = son_path(word);
  DyadicWord cur = seeds_[1 - path[0]];
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto s = sons(cur);
    if (path[i] >= s.size()) throw InfeasibleError("partner lineage has fewer sons");
    cur = s[path[i]];
  }
  return cur;
}

std::string SelectedFamily::export_table() const {
  std::ostringstream os;
  os << "generation\torder\tword\tlineage\ttype\tpartner\n";
  for (std::size_t k = 0; k < generations_.size(); ++k) {
    std::map<std::pair<int, std::uint64_t>, const Member*> by_pair;
    for (const Member& m : generations_[k]) by_pair[{m.lineage, m.pair}] = &m;
    for (const Member& m : generations_[k]) {
      const Member* other = by_pair.at({1 - m.lineage, m.pair});
      os << k << '\t' << m.word.order() << '\t' << m.word.str() << '\t' << m.lineage << '\t'
         << to_string(m.type) << '\t' << other->word.str() << '\n';
    }
  }
  return os.str();
}

std::vector<std::string> verify_family(const SelectedFamily& family) {
  std::vector<std::string> bad;
  const ConstructionParams& prm = family.params();
  const TypeWindows& win = prm.windows;
  for (std::size_t k = 0; k < family.generation_count(); ++k) {
    const auto& gen = family.generation(k);
    const std::uint64_t n = family.generation_order(k);
    const std::string tag = "G_" + std::to_string(k) + ": ";
    std::map<std::pair<int, std::uint64_t>, int> pair_count;
    std::map<std::string, std::size_t> sons_of;
    for (const Member& m : gen) {
      if (m.word.order() != n) bad.push_back(tag + m.word.str() + " has wrong order");
      const double r = static_cast<double>(m.word.zero_count()) / static_cast<double>(n);
      if (!(win.beta1 < r && r < win.gamma2)) bad.push_back(tag + m.word.str() + " ratio outside (beta1, gamma2)");
      ++pair_count[{m.lineage, m.pair}];
      if (k > 0) {
        const DyadicWord father = m.word.prefix(n - 6);
        const auto& prev = family.generation(k - 1);
        const bool found = std::any_of(prev.begin(), prev.end(),
                                       [&](const Member& f) { return f.word == father; });
        if (!found) bad.push_back(tag + m.word.str() + " has no father in G_" + std::to_string(k - 1));
        ++sons_of[father.str()];
        const DyadicInterval fi = interval_of(father);
        const DyadicInterval ci = interval_of(m.word);
        const Dyadic margin = Dyadic::pow2_neg(static_cast<std::uint32_t>(n));
        if (!(ci.left() - fi.left() > margin) || !(fi.right() - ci.right() > margin)) {
          bad.push_back(tag + m.word.str() + " too close to its father's endpoints");
        }
      }
    }
    if (k > 0) {
      std::optional<std::size_t> spf;
      for (const auto& [f, c] : sons_of) {
        if (spf && *spf != c) bad.push_back(tag + "non-uniform sons per father");
        spf = c;
      }
      if (sons_of.size() != family.generation(k - 1).size()) bad.push_back(tag + "a father has no son");
    }
    for (const auto& [key, c] : pair_count) {
      if (c != 1 || pair_count.find({1 - key.first, key.second}) == pair_count.end()) {
        bad.push_back(tag + "pairing is not a bijection");
      }
    }
    const Dyadic gap = Dyadic::pow2_neg(static_cast<std::uint32_t>(n - 1));
    for (std::size_t i = 0; i < gen.size(); ++i) {
      for (std::size_t j = i + 1; j < gen.size(); ++j) {
        if (!(interval_of(gen[i].word).distance(interval_of(gen[j].word)) > gap)) {
          bad.push_back(tag + gen[i].word.str() + " and " + gen[j].word.str() + " not separated");
        }
      }
    }
    if (k == 0 && (gen.size() != 2 || gen[0].type != IntervalType::kType1 ||
                   gen[1].type != IntervalType::kType2)) {
      bad.push_back("G_0 must hold one type-1 and one type-2 interval");
    }
  }
  return bad;
}

namespace {

void add_check(ValidationReport& r, std::string name, bool ok, std::string detail = {}) {
  if (!ok && r.pass) {
    r.pass = false;
    r.first_failure = name;
  }
  r.checks.push_back(ValidationCheck{std::move(name), ok, std::move(detail)});
}

}  // namespace

ValidationReport validate(const ConstructionParams& p) {
  ValidationReport r;
  const TypeWindows& w = p.windows;
  add_check(r, "0 < beta1 < gamma1 < beta2 < gamma2 < 1/2",
            0.0 < w.beta1 && w.beta1 < w.gamma1 && w.gamma1 < w.beta2 && w.beta2 < w.gamma2 &&
                w.gamma2 < 0.5);
  const bool probs = p.p0 > 0.0 && p.p1 > 0.0 && std::abs(p.p0 + p.p1 - 1.0) <= 1e-12;
  add_check(r, "p0, p1 > 0 and p0 + p1 = 1", probs);
  if (probs) {
    const double g2 = p.g(w.gamma2);
    std::ostringstream os;
    os.precision(17);
    os << "g(gamma2) = " << g2;
    add_check(r, "g(gamma2) < 1", g2 < 1.0, os.str());
  } else {
    add_check(r, "g(gamma2) < 1", false, "probabilities invalid");
  }
  add_check(r, "p0 < p1 (g strictly increasing)", p.p0 < p.p1);
  add_check(r, "n0 positive multiple of 6", p.n0 > 0 && p.n0 % 6 == 0);
  add_check(r, "n0 <= order cap", p.n0 <= p.order_cap);
  bool growth_ok = true;
  if (p.growth.mode == Growth::Mode::kGeometric) growth_ok = p.growth.arg >= 2;
  if (p.growth.mode == Growth::Mode::kAffine) growth_ok = p.growth.arg > 0 && p.growth.arg % 6 == 0;
  add_check(r, "growth keeps orders increasing and multiples of 6", growth_ok);
  add_check(r, "selection policy is lex-smallest", p.selection_policy == "lex-smallest");
  if (!r.pass) return r;

  // Feasibility probes: seeds, the eager generations, then one lazy path per
  // lineage down to the order cap.
  try {
    auto fam = SelectedFamily::build(p, std::max<std::size_t>(p.generations, 1));
    add_check(r, "seed pair and eager generations feasible", true,
              std::to_string(fam->generation_count()) + " generations");
    for (int lineage = 0; lineage < 2; ++lineage) {
      DyadicWord cur = fam->seeds()[lineage];
      while (cur.order() + 6 <= p.order_cap) cur = fam->sons(cur).front();
    }
    add_check(r, "lazy lineage probes reach the order cap", true);
  } catch (const Error& e) {
    add_check(r, "construction feasible", false, e.what());
  }
  return r;
}

}  // namespace mfdim
