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

#include "mfdim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "mfdim/error.hpp"

namespace mfdim {

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
constexpr std::size_t kUnboundedDepth = 1u << 16;
constexpr std::size_t kExplicitOrderCap = 20;

long double safe_log2(long double x) { return x > 0.0L ? std::log2(x) : kNegInf; }

}  // namespace

ExplicitTable parse_explicit_weights(std::istream& in, bool renormalize) {
  std::map<std::string, double> rows;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> order;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string word, mass_text, extra;
    if (!(fields >> word >> mass_text) || (fields >> extra)) {
      throw UsageError("weights line " + std::to_string(line_no) + ": expected 'word mass'");
    }
    if (word.find_first_not_of("01") != std::string::npos) {
      throw UsageError("weights line " + std::to_string(line_no) + ": word must be binary");
    }
    double mass = 0.0;
    std::size_t used = 0;
    try {
      mass = std::stod(mass_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != mass_text.size() || !std::isfinite(mass)) {
      throw UsageError("weights line " + std::to_string(line_no) + ": bad mass '" + mass_text + "'");
    }
    if (mass < 0.0) {
      throw IntegrityError("weights line " + std::to_string(line_no) + ": negative mass");
    }
    if (order && *order != word.size()) {
      throw IntegrityError("weights line " + std::to_string(line_no) +
                           ": words must share one order");
    }
    order = word.size();
    if (!rows.emplace(word, mass).second) {
      throw IntegrityError("weights line " + std::to_string(line_no) + ": duplicate word " + word);
    }
  }
  if (!order) throw IntegrityError("weights: no entries");
  if (*order > kExplicitOrderCap) {
    throw DepthExceededError("weights: order " + std::to_string(*order) + " exceeds " +
                             std::to_string(kExplicitOrderCap));
  }
  ExplicitTable t;
  t.order = *order;
  t.masses.assign(std::size_t{1} << t.order, 0.0);
  long double total = 0.0L;
  for (const auto& [w, m] : rows) {
    t.masses[static_cast<std::size_t>(DyadicWord(w).index())] = m;
    total += m;
  }
  if (total <= 0.0L) throw IntegrityError("weights: total mass is zero");
  if (std::abs(total - 1.0L) > 1e-12L) {
    if (!renormalize) {
      std::ostringstream os;
      os.precision(17);
      os << "weights: total mass " << static_cast<double>(total) << " differs from 1";
      throw IntegrityError(os.str());
    }
    for (double& m : t.masses) m = static_cast<double>(m / total);
  }
  return t;
}

MeasureModel MeasureModel::uniform() { return MeasureModel(); }

MeasureModel MeasureModel::cascade(double p0, double p1) {
  if (!(p0 > 0.0 && p1 > 0.0) || std::abs(p0 + p1 - 1.0) > 1e-12) {
    throw DomainError("cascade weights must be positive and sum to 1");
  }
  MeasureModel m;
  m.kind_ = Kind::kCascade;
  m.p0_ = p0;
  m.p1_ = p1;
  m.lp0_ = std::log2(static_cast<long double>(p0));
  m.lp1_ = std::log2(static_cast<long double>(p1));
  return m;
}

MeasureModel MeasureModel::selected_family(std::shared_ptr<const SelectedFamily> family) {
  if (!family) throw DomainError("selected_family: null family");
  MeasureModel m = cascade(family->params().p0, family->params().p1);
  m.kind_ = Kind::kSelectedFamily;
  m.family_ = std::move(family);
  return m;
}

MeasureModel MeasureModel::explicit_weights(ExplicitTable table) {
  if (table.masses.size() != (std::size_t{1} << table.order)) {
    throw IntegrityError("explicit table size does not match its order");
  }
  long double total = 0.0L;
  for (double x : table.masses) {
    if (!(x >= 0.0)) throw IntegrityError("explicit table holds a negative mass");
    total += x;
  }
  if (std::abs(total - 1.0L) > 1e-12L) throw IntegrityError("explicit table total differs from 1");
  auto levels = std::make_shared<std::vector<std::vector<double>>>(table.order + 1);
  (*levels)[table.order] = std::move(table.masses);
  for (std::size_t m = table.order; m-- > 0;) {
    const auto& below = (*levels)[m + 1];
    auto& here = (*levels)[m];
    here.resize(std::size_t{1} << m);
    for (std::size_t j = 0; j < here.size(); ++j) here[j] = below[2 * j] + below[2 * j + 1];
  }
  MeasureModel m;
  m.kind_ = Kind::kExplicitWeights;
  m.levels_ = std::move(levels);
  return m;
}

std::string MeasureModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kUniform: os << "uniform"; break;
    case Kind::kCascade: os << "cascade(" << p0_ << ", " << p1_ << ")"; break;
    case Kind::kSelectedFamily: os << "selected-family(" << p0_ << ", " << p1_ << ")"; break;
    case Kind::kExplicitWeights: os << "explicit(order " << levels_->size() - 1 << ")"; break;
  }
  return os.str();
}

std::size_t MeasureModel::depth_cap() const {
  switch (kind_) {
    case Kind::kSelectedFamily: return family_->params().order_cap;
    case Kind::kExplicitWeights: return levels_->size() - 1;
    default: return kUnboundedDepth;
  }
}

void MeasureModel::check_depth(std::size_t order) const {
  if (order > depth_cap()) {
    throw DepthExceededError("order " + std::to_string(order) + " exceeds the depth cap " +
                             std::to_string(depth_cap()) + " of " + describe());
  }
}

bool MeasureModel::full_support() const {
  if (kind_ != Kind::kExplicitWeights) return true;
  const auto& leaves = levels_->back();
  return std::all_of(leaves.begin(), leaves.end(), [](double x) { return x > 0.0; });
}

std::array<long double, 2> MeasureModel::log2_split(const DyadicWord& parent) const {
  check_depth(parent.order() + 1);
  switch (kind_) {
    case Kind::kUniform: return {-1.0L, -1.0L};
    case Kind::kCascade: return {lp0_, lp1_};
    case Kind::kSelectedFamily:
      if (family_->contains_selected(parent)) return {lp0_, lp1_};
      return {-1.0L, -1.0L};
    case Kind::kExplicitWeights: {
      const std::size_t m = parent.order();
      const auto j = static_cast<std::size_t>(parent.index());
      const long double here = (*levels_)[m][j];
      if (here <= 0.0L) return {kNegInf, kNegInf};
      return {safe_log2((*levels_)[m + 1][2 * j] / here),
              safe_log2((*levels_)[m + 1][2 * j + 1] / here)};
    }
  }
  return {-1.0L, -1.0L};
}

bool MeasureModel::uniform_below(const DyadicWord& word) const {
  switch (kind_) {
    case Kind::kUniform: return true;
    case Kind::kCascade: return p0_ == p1_;
    case Kind::kSelectedFamily: return !family_->contains_selected(word);
    case Kind::kExplicitWeights: return word.order() >= levels_->size() - 1;
  }
  return false;
}

long double MeasureModel::log2_mass(const DyadicWord& word) const {
  const std::size_t n = word.order();
  check_depth(n);
  switch (kind_) {
    case Kind::kUniform: return -static_cast<long double>(n);
    case Kind::kCascade: {
      const auto z = static_cast<long double>(word.zero_count());
      return z * lp0_ + (static_cast<long double>(n) - z) * lp1_;
    }
    case Kind::kSelectedFamily: {
      // Letters whose parent prefix contains a selected interval follow the
      // cascade weights; the rest halve the mass.
      const std::size_t weighted = std::min(family_->selected_prefix_depth(word) + 1, n);
      const std::size_t z = word.prefix(weighted).zero_count();
      return static_cast<long double>(z) * lp0_ +
             static_cast<long double>(weighted - z) * lp1_ -
             static_cast<long double>(n - weighted);
    }
    case Kind::kExplicitWeights:
      return safe_log2((*levels_)[n][static_cast<std::size_t>(word.index())]);
  }
  return 0.0L;
}

long double MeasureModel::mass(const DyadicWord& word) const {
  return std::exp2(log2_mass(word));
}

namespace {

void block_walk(const MeasureModel& model, const DyadicWord& word, long double lg, std::size_t n,
                const std::function<void(const LevelBlock&)>& fn) {
  const std::size_t m = word.order();
  if (m == n) {
    fn(LevelBlock{word, lg, 0});
    return;
  }
  if (lg == kNegInf) {
    fn(LevelBlock{word, kNegInf, n - m});
    return;
  }
  if (model.uniform_below(word)) {
    fn(LevelBlock{word, lg - static_cast<long double>(n - m), n - m});
    return;
  }
  const auto split = model.log2_split(word);
  for (int b = 0; b < 2; ++b) block_walk(model, word.child(b), lg + split[b], n, fn);
}

}  // namespace

void for_each_block(const MeasureModel& model, const DyadicWord& root, long double root_log2,
                    std::size_t n, const std::function<void(const LevelBlock&)>& fn) {
  if (root.order() > n) throw DomainError("for_each_block: root below the target order");
  if (n > model.depth_cap()) {
    throw DepthExceededError("order " + std::to_string(n) + " exceeds the depth cap of " +
                             model.describe());
  }
  block_walk(model, root, root_log2, n, fn);
}

void for_each_block(const MeasureModel& model, std::size_t n,
                    const std::function<void(const LevelBlock&)>& fn) {
  for_each_block(model, DyadicWord(), 0.0L, n, fn);
}

namespace {

struct RangeQuery {
  const MeasureModel& model;
  const BigInt& lo;
  const BigInt& hi;
  std::size_t depth;
  long double acc = 0.0L;

  void visit(const DyadicWord& word, long double lg, const BigInt& index) {
    if (lg == kNegInf) return;
    const std::size_t shift = depth - word.order();
    const BigInt first = index << shift;
    const BigInt last = ((index + 1) << shift) - 1;
    if (last < lo || first > hi) return;
    if (first >= lo && last <= hi) {
      acc += std::exp2(lg);
      return;
    }
    if (model.uniform_below(word)) {
      const BigInt a = first > lo ? first : lo;
      const BigInt b = last < hi ? last : hi;
      const auto count = static_cast<long double>(b - a + 1);
      acc += std::exp2(lg - static_cast<long double>(shift)) * count;
      return;
    }
    const auto split = model.log2_split(word);
    for (int b = 0; b < 2; ++b) visit(word.child(b), lg + split[b], 2 * index + b);
  }
};

}  // namespace

long double range_mass(const MeasureModel& model, const BigInt& lo, const BigInt& hi,
                       std::size_t depth) {
  if (depth > model.depth_cap()) {
    throw DepthExceededError("ball depth " + std::to_string(depth) + " exceeds the depth cap of " +
                             model.describe());
  }
  const BigInt top = (BigInt(1) << depth) - 1;
  const BigInt a = lo < 0 ? BigInt(0) : lo;
  const BigInt b = hi > top ? top : hi;
  if (a > b) return 0.0L;
  RangeQuery q{model, a, b, depth};
  q.visit(DyadicWord(), 0.0L, BigInt(0));
  return q.acc;
}

MassEnclosure ball_mass_bounds(const MeasureModel& model, const Dyadic& center,
                               const Dyadic& radius, std::size_t depth) {
  if (center.is_negative() || !(center < Dyadic::from_int(1))) {
    throw DomainError("ball center " + center.to_string() + " outside [0,1)");
  }
  if (radius.is_negative() || radius.is_zero()) throw DomainError("ball radius must be positive");
  const Dyadic left = center - radius;
  const Dyadic right = center + radius;
  const auto d = static_cast<std::uint32_t>(depth);
  MassEnclosure e;
  e.lower = range_mass(model, left.ceil_scaled(d), right.floor_scaled(d) - 1, depth);
  e.upper = range_mass(model, left.floor_scaled(d), right.ceil_scaled(d) - 1, depth);
  return e;
}

bool mass_envelope_check(const MeasureModel& model, std::size_t n, double p0, double p1) {
  const long double lo = static_cast<long double>(n) * std::log2(static_cast<long double>(p0));
  const long double hi = static_cast<long double>(n) * std::log2(static_cast<long double>(p1));
  const long double tol = 1e-12L * (1.0L + static_cast<long double>(n));
  bool ok = true;
  for_each_block(model, n, [&](const LevelBlock& b) {
    if (b.log2_each < lo - tol || b.log2_each > hi + tol) ok = false;
  });
  return ok;
}

bool mass_envelope_check(const MeasureModel& model, std::size_t n) {
  return mass_envelope_check(model, n, model.p0(), model.p1());
}

}  // namespace mfdim
