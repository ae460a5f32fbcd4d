#pragma once

// Truncated binary expansions and the exponential e(x) = exp(2*pi*i*x).
//
// A DyadicReal holds the first `precision` binary digits of some x in [0,1),
// most significant first; digit index 1 is the first digit after the point.
// It names the interval [prefix/2^p, prefix/2^p + 2^-p).  All digit-path
// arithmetic is exact integer arithmetic; floating point only enters when a
// finished rational argument is handed to e().

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "equidist/common.hpp"

namespace equidist {

class DyadicReal {
 public:
  explicit DyadicReal(std::vector<std::uint8_t> digits)
      : digits_(std::move(digits)) {
    if (digits_.empty())
      throw std::invalid_argument("DyadicReal needs at least one digit");
    for (auto d : digits_)
      if (d > 1) throw std::invalid_argument("binary digits must be 0 or 1");
  }

  static DyadicReal zeros(int n) {
    return DyadicReal(std::vector<std::uint8_t>(static_cast<size_t>(n), 0));
  }

  // Test/CLI convenience: "101" -> 0.101.
  static DyadicReal from_bits(const std::string& bits) {
    std::vector<std::uint8_t> d;
    d.reserve(bits.size());
    for (char c : bits) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("bit string must contain only 0/1");
      d.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return DyadicReal(std::move(d));
  }

  // First n digits of a rational in [0,1), i.e. floor(r*2^n)/2^n.
  static DyadicReal truncation_of(const Rat& r, int n) {
    if (r < 0 || r >= 1)
      throw std::invalid_argument("truncation_of needs r in [0,1)");
    Int k = (numerator(r) << n) / denominator(r);
    std::vector<std::uint8_t> d(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      d[static_cast<size_t>(i)] =
          static_cast<std::uint8_t>(bit_test(k, static_cast<unsigned>(n - 1 - i)) ? 1 : 0);
    return DyadicReal(std::move(d));
  }

  int precision() const { return static_cast<int>(digits_.size()); }

  // 1-based digit access.
  int digit(int i) const {
    if (i < 1 || i > precision())
      throw std::out_of_range("digit index out of range");
    return digits_[static_cast<size_t>(i - 1)];
  }

  const std::vector<std::uint8_t>& digits() const { return digits_; }

  void push_back(int bit) {
    if (bit != 0 && bit != 1)
      throw std::invalid_argument("binary digits must be 0 or 1");
    digits_.push_back(static_cast<std::uint8_t>(bit));
  }

  // The stored prefix as an integer: value = prefix_int / 2^precision.
  Int prefix_int() const {
    Int v = 0;
    for (auto d : digits_) {
      v <<= 1;
      v |= static_cast<unsigned>(d);
    }
    return v;
  }

  Rat to_rational() const { return Rat(prefix_int(), pow2(precision())); }

  std::string to_bit_string() const {
    std::string s;
    s.reserve(digits_.size());
    for (auto d : digits_) s.push_back(static_cast<char>('0' + d));
    return s;
  }

  bool operator==(const DyadicReal& o) const { return digits_ == o.digits_; }

 private:
  std::vector<std::uint8_t> digits_;
};

struct FracMulResult {
  DyadicReal value;       // first out_bits digits of {a * x_low}
  Rat error_bound;        // circle distance to the true {a*x} is < this
};

// Truncated fractional part of an integer multiple, digit path only.
//
// With x_low = prefix/2^p the product a*x_low is exact; its fractional part
// is (a*prefix mod 2^p)/2^p, and we keep the leading out_bits digits.  The
// true x lies within 2^-p above x_low, so the true {a*x} sits within
// a*2^-p + 2^-out_bits of the returned value (distance on the circle).  The
// precondition precision >= out_bits + bit_length(a) keeps the returned
// digits meaningful: the unknown tail of x cannot reach above bit out_bits.
inline FracMulResult frac_mul(const Int& a, const DyadicReal& x, int out_bits) {
  if (a < 0)
    throw std::invalid_argument(
        "frac_mul needs a >= 0; use 1 - frac_mul(-a, x) via the caller");
  if (out_bits < 1) throw std::invalid_argument("out_bits must be >= 1");
  int need = out_bits + bit_length(a);
  if (x.precision() < need)
    throw InsufficientPrecision(
        "frac_mul(a, x, " + std::to_string(out_bits) + "): need precision >= " +
        std::to_string(need) + ", have " + std::to_string(x.precision()));
  int p = x.precision();
  Int prod = a * x.prefix_int();
  // prod mod 2^p, then keep the top out_bits of those p fractional digits.
  Int frac = prod & (pow2(p) - 1);
  Int kept = frac >> (p - out_bits);
  std::vector<std::uint8_t> d(static_cast<size_t>(out_bits));
  for (int i = 0; i < out_bits; ++i)
    d[static_cast<size_t>(i)] = static_cast<std::uint8_t>(
        bit_test(kept, static_cast<unsigned>(out_bits - 1 - i)) ? 1 : 0);
  Rat bound = Rat(a, pow2(p)) + pow2_inv(out_bits);
  return FracMulResult{DyadicReal(std::move(d)), bound};
}

namespace detail {
inline constexpr long double two_pi_l =
    6.283185307179586476925286766559005768394L;
}

// e(x) = exp(2*pi*i*x) for an exact rational argument.
//
// Quarter turns are returned exactly (so products that should vanish do
// vanish exactly).  Otherwise the argument is reduced mod 1 in exact rational
// arithmetic, converted to 64-bit fixed point (error < 2^-64, and the 64-bit
// numerator converts to x86 long double without rounding), and evaluated with
// sinl/cosl before rounding to double.  Total error per component stays below
// ~2e-16, well inside the 1e-15 contract.
inline Complex e_of(const Rat& x) {
  Rat r = frac_rat(x);
  if (r == 0) return {1.0, 0.0};
  if (denominator(r) == 2) return {-1.0, 0.0};
  if (denominator(r) == 4) return numerator(r) == 1 ? Complex{0.0, 1.0}
                                                    : Complex{0.0, -1.0};
  Int k = (numerator(r) << 64) / denominator(r);
  long double t = k.convert_to<long double>() * 0x1p-64L;
  long double th = detail::two_pi_l * t;
  return {static_cast<double>(cosl(th)), static_cast<double>(sinl(th))};
}

// Extended-precision variant used by the Fourier product (113-bit mantissa).
struct QComplex {
  Quad re, im;
  QComplex operator*(const QComplex& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  QComplex& operator*=(const QComplex& o) { return *this = *this * o; }
  Quad abs() const { return sqrt(re * re + im * im); }
};

inline QComplex e_of_quad(const Rat& x) {
  Rat r = frac_rat(x);
  if (r == 0) return {Quad(1), Quad(0)};
  if (denominator(r) == 2) return {Quad(-1), Quad(0)};
  if (denominator(r) == 4)
    return numerator(r) == 1 ? QComplex{Quad(0), Quad(1)}
                             : QComplex{Quad(0), Quad(-1)};
  Int k = (numerator(r) << 128) / denominator(r);
  Quad t = Quad(k);
  t = ldexp(t, -128);
  // 2*pi to quad precision (first 40 digits are plenty for 113 bits).
  static const Quad two_pi =
      Quad("6.283185307179586476925286766559005768394338798750211641949889");
  Quad th = two_pi * t;
  return {cos(th), sin(th)};
}

}  // namespace equidist
