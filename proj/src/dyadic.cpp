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

#include "mfdim/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "mfdim/error.hpp"

namespace mfdim {

namespace {

// floor(num / 2^s) for any sign.
BigInt floor_shift(const BigInt& num, std::uint32_t s) {
  if (s == 0) return num;
  if (num >= 0) return num >> s;
  BigInt mag = -num;
  BigInt one = 1;
  BigInt q = (mag + (one << s) - 1) >> s;
  return -q;
}

std::size_t bit_length(const BigInt& mag) {
  if (mag == 0) return 0;
  return boost::multiprecision::msb(mag) + 1;
}

template <typename Real>
Real dyadic_to_real(const BigInt& num, std::uint32_t exp) {
  if (num == 0) return Real(0);
  BigInt mag = num < 0 ? BigInt(-num) : num;
  long long e = exp;
  const std::size_t bits = bit_length(mag);
  if (bits > 64) {
    const std::size_t s = bits - 64;
    mag >>= s;
    e -= static_cast<long long>(s);
  }
  const Real r = std::ldexp(static_cast<Real>(static_cast<std::uint64_t>(mag)),
                            static_cast<int>(-e));
  return num < 0 ? -r : r;
}

}  // namespace

Dyadic::Dyadic(BigInt num, std::uint32_t exp) : num_(std::move(num)), exp_(exp) {
  normalize();
}

void Dyadic::normalize() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  const BigInt mag = num_ < 0 ? BigInt(-num_) : num_;
  const std::uint32_t tz = static_cast<std::uint32_t>(boost::multiprecision::lsb(mag));
  const std::uint32_t s = std::min(tz, exp_);
  if (s > 0) {
    num_ = floor_shift(num_, s);
    exp_ -= s;
  }
}

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite value has no dyadic form");
  if (value == 0.0) return Dyadic();
  int e = 0;
  const double m = std::frexp(value, &e);
  // |m| in [0.5, 1): 53 significant bits.
  const long long mant = static_cast<long long>(std::ldexp(m, 53));
  const int shift = e - 53;
  if (shift >= 0) return Dyadic(BigInt(mant) << shift, 0);
  return Dyadic(BigInt(mant), static_cast<std::uint32_t>(-shift));
}

double Dyadic::to_double() const { return dyadic_to_real<double>(num_, exp_); }

long double Dyadic::to_long_double() const {
  return dyadic_to_real<long double>(num_, exp_);
}

BigInt Dyadic::floor_scaled(std::uint32_t d) const {
  if (d >= exp_) return num_ << (d - exp_);
  return floor_shift(num_, exp_ - d);
}

BigInt Dyadic::ceil_scaled(std::uint32_t d) const { return -((-*this).floor_scaled(d)); }

Dyadic Dyadic::abs() const { return num_ < 0 ? -*this : *this; }

Dyadic Dyadic::scaled_pow2(int k) const {
  if (k >= 0) {
    const auto uk = static_cast<std::uint32_t>(k);
    if (exp_ >= uk) return Dyadic(num_, exp_ - uk);
    return Dyadic(num_ << (uk - exp_), 0);
  }
  return Dyadic(num_, exp_ + static_cast<std::uint32_t>(-k));
}

std::string Dyadic::to_string() const {
  std::ostringstream os;
  os << num_;
  if (exp_ > 0) os << "/2^" << exp_;
  return os.str();
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exp_, b.exp_);
  return Dyadic((a.num_ << (e - a.exp_)) + (b.num_ << (e - b.exp_)), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exp_, b.exp_);
  return Dyadic((a.num_ << (e - a.exp_)) - (b.num_ << (e - b.exp_)), e);
}

Dyadic operator-(const Dyadic& a) { return Dyadic(-a.num_, a.exp_); }

bool operator==(const Dyadic& a, const Dyadic& b) {
  return a.exp_ == b.exp_ && a.num_ == b.num_;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exp_, b.exp_);
  const BigInt lhs = a.num_ << (e - a.exp_);
  const BigInt rhs = b.num_ << (e - b.exp_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

DyadicWord::DyadicWord(std::string bits) : bits_(std::move(bits)) {
  for (char c : bits_) {
    if (c != '0' && c != '1') throw DomainError("word must contain only 0 and 1: '" + bits_ + "'");
  }
}

DyadicWord DyadicWord::from_index(const BigInt& index, std::size_t n) {
  if (index < 0 || bit_length(index) > n) {
    throw DomainError("index does not fit in a word of order " + std::to_string(n));
  }
  std::string bits(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if (boost::multiprecision::bit_test(index, static_cast<unsigned>(n - 1 - i))) bits[i] = '1';
  }
  DyadicWord w;
  w.bits_ = std::move(bits);
  return w;
}

std::size_t DyadicWord::zero_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '0'));
}

BigInt DyadicWord::index() const {
  BigInt v = 0;
  for (char c : bits_) {
    v <<= 1;
    if (c == '1') v += 1;
  }
  return v;
}

DyadicWord DyadicWord::prefix(std::size_t n) const {
  DyadicWord w;
  w.bits_ = bits_.substr(0, std::min(n, bits_.size()));
  return w;
}

DyadicWord DyadicWord::child(int b) const {
  DyadicWord w;
  w.bits_ = bits_;
  w.bits_.push_back(b ? '1' : '0');
  return w;
}

DyadicWord DyadicWord::extended(const DyadicWord& tail) const {
  DyadicWord w;
  w.bits_ = bits_ + tail.bits_;
  return w;
}

bool DyadicWord::is_prefix_of(const DyadicWord& other) const {
  return bits_.size() <= other.bits_.size() &&
         other.bits_.compare(0, bits_.size(), bits_) == 0;
}

std::size_t DyadicWord::common_prefix_length(const DyadicWord& other) const {
  const std::size_t n = std::min(bits_.size(), other.bits_.size());
  std::size_t i = 0;
  while (i < n && bits_[i] == other.bits_[i]) ++i;
  return i;
}

DyadicInterval::DyadicInterval(BigInt left_num, std::uint32_t order)
    : left_num_(std::move(left_num)), order_(order) {
  if (left_num_ < 0 || bit_length(left_num_) > order_) {
    throw DomainError("interval numerator out of range for its order");
  }
}

bool DyadicInterval::contains(const DyadicInterval& other) const {
  if (other.order_ < order_) return false;
  return (other.left_num_ >> (other.order_ - order_)) == left_num_;
}

bool DyadicInterval::disjoint(const DyadicInterval& other) const {
  return right() <= other.left() || other.right() <= left();
}

Dyadic DyadicInterval::distance(const DyadicInterval& other) const {
  if (right() <= other.left()) return other.left() - right();
  if (other.right() <= left()) return left() - other.right();
  return Dyadic();
}

std::string DyadicInterval::to_string() const {
  std::ostringstream os;
  os << '[' << left_num_ << "/2^" << order_ << ", " << (left_num_ + 1) << "/2^" << order_ << ')';
  return os.str();
}

const char* to_string(IntervalType t) {
  switch (t) {
    case IntervalType::kType1: return "type1";
    case IntervalType::kType2: return "type2";
    case IntervalType::kUntyped: return "untyped";
  }
  return "untyped";
}

bool TypeWindows::in_window(std::size_t zeros, std::size_t order, IntervalType t) const {
  if (order == 0) return false;
  const double ratio = static_cast<double>(zeros) / static_cast<double>(order);
  switch (t) {
    case IntervalType::kType1: return beta1 < ratio && ratio < gamma1;
    case IntervalType::kType2: return beta2 < ratio && ratio < gamma2;
    case IntervalType::kUntyped: return false;
  }
  return false;
}

DyadicInterval interval_of(const DyadicWord& word) {
  return DyadicInterval(word.index(), static_cast<std::uint32_t>(word.order()));
}

std::size_t zero_count(const DyadicWord& word) { return word.zero_count(); }

DyadicWord locate(const Dyadic& x, std::size_t n) {
  if (x < Dyadic() || x >= Dyadic::from_int(1)) {
    throw DomainError("locate: point " + x.to_string() + " outside [0,1)");
  }
  return DyadicWord::from_index(x.floor_scaled(static_cast<std::uint32_t>(n)), n);
}

DyadicWord locate(double x, std::size_t n) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("locate: point outside [0,1)");
  return locate(Dyadic::from_double(x), n);
}

IntervalType type_of(const DyadicWord& word, const TypeWindows& windows) {
  if (word.order() == 0) throw DomainError("type_of: empty word has no type");
  const std::size_t z = word.zero_count();
  if (windows.in_window(z, word.order(), IntervalType::kType1)) return IntervalType::kType1;
  if (windows.in_window(z, word.order(), IntervalType::kType2)) return IntervalType::kType2;
  return IntervalType::kUntyped;
}

std::vector<DyadicWord> tilde_set(const DyadicWord& word, const TypeWindows& windows) {
  const IntervalType t = type_of(word, windows);
  if (t == IntervalType::kUntyped) throw DomainError("tilde_set: word '" + word.str() + "' is untyped");
  std::vector<DyadicWord> out;
  for (unsigned c = 0; c < 64; ++c) {
    DyadicWord ext = word.extended(DyadicWord::from_index(BigInt(c), 6));
    if (type_of(ext, windows) == t) out.push_back(std::move(ext));
  }
  return out;
}

std::vector<DyadicWord> check_set(const DyadicWord& word, const TypeWindows& windows,
                                  std::size_t enumeration_cap) {
  const IntervalType t = type_of(word, windows);
  if (t == IntervalType::kUntyped) throw DomainError("check_set: word '" + word.str() + "' is untyped");
  const std::size_t n = word.order();
  if (n > enumeration_cap) {
    throw DepthExceededError("check_set: order " + std::to_string(2 * n) +
                             " enumeration exceeds cap (n=" + std::to_string(n) +
                             " > " + std::to_string(enumeration_cap) + ")");
  }
  const IntervalType want = t == IntervalType::kType1 ? IntervalType::kType2 : IntervalType::kType1;
  const std::size_t base_zeros = word.zero_count();
  std::vector<DyadicWord> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t c = 0; c < count; ++c) {
    const std::size_t z = n - static_cast<std::size_t>(std::popcount(c));
    if (windows.in_window(base_zeros + z, 2 * n, want)) {
      out.push_back(word.extended(DyadicWord::from_index(BigInt(c), n)));
    }
  }
  return out;
}

namespace {

bool window_meets_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t order,
                        IntervalType target, const TypeWindows& windows) {
  if (target == IntervalType::kUntyped || lo > hi || order == 0) return false;
  const double beta = target == IntervalType::kType1 ? windows.beta1 : windows.beta2;
  // Smallest z >= lo strictly above the lower bound, tested with the same
  // predicate as type_of.
  const double guess = std::floor(beta * static_cast<double>(order));
  std::uint64_t z = lo;
  if (guess > 2.0) z = std::max<std::uint64_t>(lo, static_cast<std::uint64_t>(guess) - 2);
  const double m = static_cast<double>(order);
  while (z <= hi && !(static_cast<double>(z) / m > beta)) ++z;
  if (z > hi) return false;
  return windows.in_window(z, order, target);
}

}  // namespace

bool contains_type_descendant(const DyadicWord& word, std::uint64_t target_order,
                              IntervalType target, const TypeWindows& windows) {
  const std::uint64_t n = word.order();
  if (target_order < n) throw DomainError("contains_type_descendant: target order below word order");
  const std::uint64_t z = word.zero_count();
  return window_meets_range(z, z + (target_order - n), target_order, target, windows);
}

bool reachable_in_blocks(std::size_t zeros, std::uint64_t order, std::uint64_t target_order,
                         std::size_t block, std::size_t min_zeros, std::size_t max_zeros,
                         IntervalType target, const TypeWindows& windows) {
  if (target_order < order || block == 0) return false;
  if ((target_order - order) % block != 0) return false;
  const std::uint64_t steps = (target_order - order) / block;
  return window_meets_range(zeros + steps * min_zeros, zeros + steps * max_zeros, target_order,
                            target, windows);
}

}  // namespace mfdim
