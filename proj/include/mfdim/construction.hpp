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

// Selected-interval families G_k: seeds, the three-phase growth rule, the
// separation constraints and the pairing between the two seed lineages.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfdim/dyadic.hpp"

namespace mfdim {

struct Growth {
  enum class Mode { kTower, kGeometric, kAffine };
  Mode mode = Mode::kGeometric;
  std::uint64_t arg = 2;  // factor for geometric, step for affine

  // "tower", "geometric(F)" or "affine(S)".
  static Growth parse(std::string_view text);
  std::string to_string() const;
};

struct ConstructionParams {
  TypeWindows windows;
  double p0 = 0.0;
  double p1 = 0.0;
  std::uint64_t n0 = 0;
  Growth growth;
  std::string selection_policy = "lex-smallest";
  std::uint64_t order_cap = kDefaultOrderCap;
  std::size_t generations = 3;  // eager depth used by builds and reports

  // x -> -(x log(p0/p1) + log p1) / log 2
  double g(double x) const;
};

double exponent_map(double x, double p0, double p1);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  bool pass = true;
  std::string first_failure;
  std::vector<ValidationCheck> checks;
};

// Never throws for bad parameters; failures are carried in the report.
ValidationReport validate(const ConstructionParams& params);

class Schedule {
 public:
  struct Phase {
    std::size_t index = 0;  // p with n_p <= order < n_{p+1}
    int rule = 1;           // 1, 2 or 3
    std::uint64_t start = 0;
    std::optional<std::uint64_t> previous;  // n_{p-1}
    std::optional<std::uint64_t> next;      // n_{p+1}; empty when unrepresentable
  };

  Schedule() = default;
  Schedule(std::vector<std::uint64_t> orders, std::optional<std::uint64_t> next_beyond,
           std::uint64_t cap)
      : orders_(std::move(orders)), next_beyond_(next_beyond), cap_(cap) {}

  const std::vector<std::uint64_t>& orders() const { return orders_; }
  // First entry past the cap, if it fits in 64 bits.
  std::optional<std::uint64_t> next_beyond_cap() const { return next_beyond_; }
  std::uint64_t cap() const { return cap_; }

  Phase phase_of(std::uint64_t order) const;

 private:
  std::vector<std::uint64_t> orders_;
  std::optional<std::uint64_t> next_beyond_;
  std::uint64_t cap_ = 0;
};

// First `count` entries; throws CappedScheduleError past the order cap.
Schedule schedule(const ConstructionParams& params, std::size_t count);
// Every entry up to the cap, plus the first entry beyond it when representable.
Schedule schedule_to_cap(const ConstructionParams& params);

struct Member {
  DyadicWord word;
  int lineage = 0;         // 0: descends from the type-1 seed, 1: from the type-2 seed
  std::uint64_t pair = 0;  // members with equal pair index and generation are related
  IntervalType type = IntervalType::kUntyped;
};

// Lexicographically smallest separated (type 1, type 2) pair of order n0.
std::array<DyadicWord, 2> seed_generation(const ConstructionParams& params);

class SelectedFamily {
 public:
  // Seeds only. Throws InfeasibleError when no admissible pair exists.
  explicit SelectedFamily(ConstructionParams params);
  ~SelectedFamily();
  SelectedFamily(SelectedFamily&&) noexcept;
  SelectedFamily& operator=(SelectedFamily&&) noexcept;

  static std::shared_ptr<const SelectedFamily> build(const ConstructionParams& params,
                                                     std::size_t generations);

  // Appends G_{k+1}; throws InfeasibleError naming the father without an
  // admissible son.
  void build_next_generation();

  const ConstructionParams& params() const { return params_; }
  const Schedule& schedule() const { return schedule_; }
  const std::array<DyadicWord, 2>& seeds() const { return seeds_; }

  std::size_t generation_count() const { return generations_.size(); }
  const std::vector<Member>& generation(std::size_t k) const { return generations_.at(k); }
  std::uint64_t generation_order(std::size_t k) const { return params_.n0 + 6 * k; }
  std::optional<std::size_t> generation_index_of_order(std::uint64_t order) const;

  // Sons of a selected father under the growth rule at its order (memoized).
  std::vector<DyadicWord> sons(const DyadicWord& father) const;

  bool is_selected(const DyadicWord& word) const;
  bool contains_selected(const DyadicWord& word) const;
  // Largest l <= order(word) such that prefix(l) contains a selected interval.
  std::size_t selected_prefix_depth(const DyadicWord& word) const;
  DyadicWord partner(const DyadicWord& word) const;
  int lineage_of(const DyadicWord& word) const;

  // "generation word lineage partner" rows for the eager generations.
  std::string export_table() const;

 private:
  struct Memo;

  void check_order(std::uint64_t order) const;
  std::vector<std::size_t> son_path(const DyadicWord& word) const;

  ConstructionParams params_;
  Schedule schedule_;
  std::array<DyadicWord, 2> seeds_;
  std::vector<std::vector<Member>> generations_;
  std::unique_ptr<Memo> memo_;
};

// Invariant sweep over the eager generations; returns human-readable
// violations (empty when every invariant holds).
std::vector<std::string> verify_family(const SelectedFamily& family);

}  // namespace mfdim
