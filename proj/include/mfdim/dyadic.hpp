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

// Binary words, dyadic rationals and dyadic intervals on [0,1).

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mfdim {

using BigInt = boost::multiprecision::cpp_int;

// Exact dyadic rational num / 2^exp, kept normalized (num odd or exp == 0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(BigInt num, std::uint32_t exp);

  static Dyadic from_double(double value);
  static Dyadic from_int(long long value) { return Dyadic(BigInt(value), 0); }
  // 2^-e
  static Dyadic pow2_neg(std::uint32_t e) { return Dyadic(BigInt(1), e); }

  const BigInt& numerator() const { return num_; }
  std::uint32_t exponent() const { return exp_; }

  double to_double() const;
  long double to_long_double() const;
  // floor(value * 2^d) and ceil(value * 2^d).
  BigInt floor_scaled(std::uint32_t d) const;
  BigInt ceil_scaled(std::uint32_t d) const;

  bool is_negative() const { return num_ < 0; }
  bool is_zero() const { return num_ == 0; }
  Dyadic abs() const;
  Dyadic scaled_pow2(int k) const;  // value * 2^k

  // "num/2^exp", or "num" when exp == 0.
  std::string to_string() const;

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a);
  friend bool operator==(const Dyadic& a, const Dyadic& b);
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  void normalize();

  BigInt num_ = 0;
  std::uint32_t exp_ = 0;
};

// A finite word over {0,1}. Order is the word length.
class DyadicWord {
 public:
  DyadicWord() = default;
  explicit DyadicWord(std::string bits);

  static DyadicWord zeros(std::size_t n) { return DyadicWord(std::string(n, '0')); }
  // Word of order n whose binary value is `index`.
  static DyadicWord from_index(const BigInt& index, std::size_t n);

  std::size_t order() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int bit(std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }  // 0-based
  std::size_t zero_count() const;
  BigInt index() const;

  DyadicWord prefix(std::size_t n) const;
  DyadicWord child(int b) const;
  DyadicWord extended(const DyadicWord& tail) const;
  bool is_prefix_of(const DyadicWord& other) const;
  std::size_t common_prefix_length(const DyadicWord& other) const;

  const std::string& str() const { return bits_; }

  friend bool operator==(const DyadicWord&, const DyadicWord&) = default;
  friend auto operator<=>(const DyadicWord& a, const DyadicWord& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::string bits_;
};

struct DyadicWordHash {
  std::size_t operator()(const DyadicWord& w) const noexcept {
    return std::hash<std::string>{}(w.str());
  }
};

// [left_num / 2^order, (left_num + 1) / 2^order)
class DyadicInterval {
 public:
  DyadicInterval(BigInt left_num, std::uint32_t order);

  const BigInt& left_numerator() const { return left_num_; }
  std::uint32_t order() const { return order_; }
  Dyadic left() const { return Dyadic(left_num_, order_); }
  Dyadic right() const { return Dyadic(left_num_ + 1, order_); }
  Dyadic length() const { return Dyadic::pow2_neg(order_); }
  Dyadic midpoint() const { return Dyadic(2 * left_num_ + 1, order_ + 1); }

  bool contains(const Dyadic& x) const { return left() <= x && x < right(); }
  bool contains(const DyadicInterval& other) const;
  bool disjoint(const DyadicInterval& other) const;
  // Distance between the closures; zero when they touch or overlap.
  Dyadic distance(const DyadicInterval& other) const;

  // "[num/2^n, num'/2^n)"
  std::string to_string() const;

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;

 private:
  BigInt left_num_;
  std::uint32_t order_;
};

enum class IntervalType { kType1, kType2, kUntyped };

const char* to_string(IntervalType t);

// Digit-frequency windows for the two interval types. Bounds are strict.
struct TypeWindows {
  double beta1 = 0.0;
  double gamma1 = 0.0;
  double beta2 = 0.0;
  double gamma2 = 0.0;

  bool in_window(std::size_t zeros, std::size_t order, IntervalType t) const;
};

// Enumeration guard for descendant sets.
inline constexpr std::size_t kDefaultOrderCap = 4096;
inline constexpr std::size_t kDefaultEnumerationCap = 20;

DyadicInterval interval_of(const DyadicWord& word);
std::size_t zero_count(const DyadicWord& word);
DyadicWord locate(const Dyadic& x, std::size_t n);
DyadicWord locate(double x, std::size_t n);
IntervalType type_of(const DyadicWord& word, const TypeWindows& windows);

// Order n+6 descendants of `word` with its own type.
std::vector<DyadicWord> tilde_set(const DyadicWord& word, const TypeWindows& windows);
// Order 2n descendants of `word` with the opposite type.
std::vector<DyadicWord> check_set(const DyadicWord& word, const TypeWindows& windows,
                                  std::size_t enumeration_cap = kDefaultEnumerationCap);

// Counting test: does some extension of `word` to `target_order` have type
// `target`? No enumeration.
bool contains_type_descendant(const DyadicWord& word, std::uint64_t target_order,
                              IntervalType target, const TypeWindows& windows);

// Same question, but each further block of `block` letters must contribute
// between min_zeros and max_zeros zeros.
bool reachable_in_blocks(std::size_t zeros, std::uint64_t order, std::uint64_t target_order,
                         std::size_t block, std::size_t min_zeros, std::size_t max_zeros,
                         IntervalType target, const TypeWindows& windows);

}  // namespace mfdim
