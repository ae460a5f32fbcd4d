#pragma once

// Shared scalar types and the error taxonomy used across the library.
//
// All exact arithmetic runs on boost::multiprecision header-only types:
//   Int  - arbitrary-precision signed integer
//   Rat  - arbitrary-precision rational (always kept normalized by boost)
//   Quad - 113-bit-significand binary float, used where double is not enough
//          (the Fourier product factors; x86 long double has only 64 mantissa
//          bits and does not qualify)

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <stdexcept>
#include <string>

namespace equidist {

inline constexpr const char* version_string = "0.1.0";

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using Quad = boost::multiprecision::cpp_bin_float_quad;
using Complex = std::complex<double>;

// Domain errors carry a stable name so the CLI can report "Name: detail" and
// exit 1 without translating messages.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define EQUIDIST_DEFINE_ERROR(Name)                     \
  class Name : public DomainError {                     \
   public:                                              \
    explicit Name(const std::string& what)              \
        : DomainError(#Name, what) {}                   \
  }

EQUIDIST_DEFINE_ERROR(InsufficientPrecision);
EQUIDIST_DEFINE_ERROR(NotDistinct);
EQUIDIST_DEFINE_ERROR(BudgetExceeded);
EQUIDIST_DEFINE_ERROR(NotInC);
EQUIDIST_DEFINE_ERROR(Saturated);
EQUIDIST_DEFINE_ERROR(BoundViolation);

#undef EQUIDIST_DEFINE_ERROR

// Number of bits in |v|; bit_length(0) == 0.
inline int bit_length(const Int& v) {
  if (v == 0) return 0;
  return static_cast<int>(boost::multiprecision::msb(abs(v))) + 1;
}

inline Int pow2(int k) { return Int(1) << k; }

// 2^-k as an exact rational (k >= 0).
inline Rat pow2_inv(int k) { return Rat(1, pow2(k)); }

inline Rat make_rat(const Int& num, const Int& den) { return Rat(num, den); }

// floor/ceil of a rational as Int.
inline Int floor_rat(const Rat& r) {
  Int q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

inline Int ceil_rat(const Rat& r) {
  Int q = numerator(r) / denominator(r);
  if (numerator(r) > 0 && q * denominator(r) != numerator(r)) ++q;
  return q;
}

// Fractional part in [0,1) of a rational (exact).
inline Rat frac_rat(const Rat& r) { return r - Rat(floor_rat(r)); }

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// "num/den" (or just "num" for integers), exact.
inline std::string to_string_rat(const Rat& r) {
  std::string out = numerator(r).str();
  if (denominator(r) != 1) out += "/" + denominator(r).str();
  return out;
}

}  // namespace equidist
