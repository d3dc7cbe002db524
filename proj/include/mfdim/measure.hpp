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

// Dyadic measures on [0,1): the uniform and cascade models, the measure
// carried by a selected-interval family, and explicit weight tables.

#include <array>
#include <cstddef>
#include <functional>
#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "mfdim/construction.hpp"
#include "mfdim/dyadic.hpp"

namespace mfdim {

// Masses at one order, indexed by word index.
struct ExplicitTable {
  std::size_t order = 0;
  std::vector<double> masses;
};

// Reads "word mass" lines ('#' comments and blank lines ignored). Every word
// must have the same order; absent words carry zero mass. Throws
// IntegrityError on negative masses, duplicates or a total away from 1
// (unless `renormalize`), and UsageError on malformed lines.
ExplicitTable parse_explicit_weights(std::istream& in, bool renormalize = false);

class MeasureModel {
 public:
  enum class Kind { kUniform, kCascade, kSelectedFamily, kExplicitWeights };

  static MeasureModel uniform();
  static MeasureModel cascade(double p0, double p1);
  static MeasureModel selected_family(std::shared_ptr<const SelectedFamily> family);
  static MeasureModel explicit_weights(ExplicitTable table);

  Kind kind() const { return kind_; }
  std::string describe() const;
  // Deepest order a mass query accepts.
  std::size_t depth_cap() const;
  double p0() const { return p0_; }
  double p1() const { return p1_; }
  const SelectedFamily* family() const { return family_.get(); }

  // log2(mass(w.b) / mass(w)) for b = 0, 1. -inf for a zero-mass child.
  std::array<long double, 2> log2_split(const DyadicWord& parent) const;
  // True when every descendant of `word` splits its mass evenly.
  bool uniform_below(const DyadicWord& word) const;

  long double log2_mass(const DyadicWord& word) const;
  long double mass(const DyadicWord& word) const;
  // Every dyadic interval carries positive mass.
  bool full_support() const;

 private:
  MeasureModel() = default;
  void check_depth(std::size_t order) const;

  Kind kind_ = Kind::kUniform;
  double p0_ = 0.5;
  double p1_ = 0.5;
  long double lp0_ = -1.0L;
  long double lp1_ = -1.0L;
  std::shared_ptr<const SelectedFamily> family_;
  // Explicit tables: levels_[m][j] is the mass of the order-m word of index j.
  std::shared_ptr<const std::vector<std::vector<double>>> levels_;
};

// A subtree whose 2^free_bits descendants at the target order all carry
// 2^log2_each.
struct LevelBlock {
  DyadicWord prefix;
  long double log2_each = 0.0L;
  std::size_t free_bits = 0;
};

// Walks all order-n words below `root` (mass 2^root_log2), collapsing
// uniform subtrees into blocks. Zero-mass subtrees are reported as blocks
// with log2_each = -inf.
void for_each_block(const MeasureModel& model, const DyadicWord& root, long double root_log2,
                    std::size_t n, const std::function<void(const LevelBlock&)>& fn);
void for_each_block(const MeasureModel& model, std::size_t n,
                    const std::function<void(const LevelBlock&)>& fn);

struct MassEnclosure {
  long double lower = 0.0L;
  long double upper = 0.0L;
  long double mid() const { return 0.5L * (lower + upper); }
};

// lower: order-`depth` intervals inside the closed ball; upper: intervals
// meeting the open ball (same value for atomless models). Balls are clipped
// to [0,1).
MassEnclosure ball_mass_bounds(const MeasureModel& model, const Dyadic& center,
                               const Dyadic& radius, std::size_t depth);

// Sum of masses over order-`depth` intervals with index in [lo, hi].
long double range_mass(const MeasureModel& model, const BigInt& lo, const BigInt& hi,
                       std::size_t depth);

// p0^n <= mass(w) <= p1^n for every order-n word.
bool mass_envelope_check(const MeasureModel& model, std::size_t n, double p0, double p1);
bool mass_envelope_check(const MeasureModel& model, std::size_t n);

}  // namespace mfdim
