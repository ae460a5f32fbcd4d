// Digit-path arithmetic: exactness of frac_mul against a rational oracle,
// the e() contract, and the digit-file round trip.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "equidist/digits_io.hpp"
#include "equidist/dyadic.hpp"
#include "equidist/rng.hpp"

using namespace equidist;

// Independent oracle: first out_bits digits of {a * x_low} straight from
// rational arithmetic, floor(frac(a*x)*2^k)/2^k.
static Rat oracle_frac_mul(const Int& a, const Rat& x_low, int out_bits) {
  Rat f = frac_rat(Rat(a) * x_low);
  Int k = floor_rat(f * Rat(pow2(out_bits)));
  return Rat(k, pow2(out_bits));
}

static Rat circle_dist(const Rat& a, const Rat& b) {
  Rat d = frac_rat(a - b);
  return d <= Rat(1, 2) ? d : 1 - d;
}

TEST_CASE("DyadicReal basics") {
  DyadicReal x = DyadicReal::from_bits("101");
  CHECK(x.precision() == 3);
  CHECK(x.digit(1) == 1);
  CHECK(x.digit(2) == 0);
  CHECK(x.digit(3) == 1);
  CHECK(x.to_rational() == Rat(5, 8));
  CHECK(x.prefix_int() == 5);
  CHECK(DyadicReal::zeros(4).to_rational() == 0);
  CHECK_THROWS_AS(DyadicReal(std::vector<std::uint8_t>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(x.digit(0), std::out_of_range);
  CHECK_THROWS_AS(x.digit(4), std::out_of_range);
}

TEST_CASE("truncation_of produces leading digits") {
  // 1/3 = 0.010101...
  CHECK(DyadicReal::truncation_of(Rat(1, 3), 6).to_bit_string() == "010101");
  CHECK(DyadicReal::truncation_of(Rat(5, 8), 3).to_bit_string() == "101");
  CHECK(DyadicReal::truncation_of(Rat(0), 4).to_bit_string() == "0000");
}

TEST_CASE("frac_mul hand-traced example") {
  // {3 * 0.101} = {15/8} = 7/8 = 0.111.  The input carries two extra digits
  // so the precision precondition (out_bits + bit_length(3) = 5) holds.
  DyadicReal x = DyadicReal::from_bits("10100");
  FracMulResult r = frac_mul(3, x, 3);
  CHECK(r.value.to_bit_string() == "111");
  CHECK(r.error_bound == Rat(3, 32) + Rat(1, 8));
}

TEST_CASE("frac_mul identity and zero") {
  DyadicReal x = DyadicReal::from_bits("1100");
  CHECK(frac_mul(1, x, 3).value.to_bit_string() == "110");
  // a = 0: bit_length(0) = 0, result is zero digits
  CHECK(frac_mul(0, x, 4).value.to_bit_string() == "0000");
}

TEST_CASE("frac_mul precision precondition") {
  DyadicReal x = DyadicReal::from_bits("101");
  CHECK_THROWS_AS(frac_mul(3, x, 3), InsufficientPrecision);
  CHECK_THROWS_AS(frac_mul(1, x, 3), InsufficientPrecision);  // needs 4
  CHECK_NOTHROW(frac_mul(1, DyadicReal::from_bits("1010"), 3));
}

TEST_CASE("frac_mul agrees with the rational oracle") {
  for (int c = 0; c < 500; ++c) {
    std::uint64_t w0 = rng_word(11, 3 * c);
    Int a = Int(w0 % (1u << 30));
    int out_bits = 1 + static_cast<int>(rng_word(11, 3 * c + 1) % 50);
    int prec = out_bits + bit_length(a) +
               static_cast<int>(rng_word(11, 3 * c + 2) % 20);
    std::vector<std::uint8_t> bits(static_cast<size_t>(prec));
    for (int i = 0; i < prec; ++i)
      bits[static_cast<size_t>(i)] =
          static_cast<std::uint8_t>(rng_bit(1000 + c, i));
    DyadicReal x{bits};
    FracMulResult got = frac_mul(a, x, out_bits);
    CHECK(got.value.to_rational() == oracle_frac_mul(a, x.to_rational(), out_bits));
  }
}

TEST_CASE("frac_mul error bound covers the unseen tail") {
  // Draw a full rational x, truncate it, and confirm the true {a x} stays
  // within the reported bound of the truncated result (circle distance).
  for (int c = 0; c < 500; ++c) {
    Int num = Int(rng_word(21, 2 * c) % 100000);
    Int den = Int(rng_word(21, 2 * c + 1) % 100000) + 100001;
    Rat x_true(num, den);
    Int a = Int(rng_word(22, c) % 1000);
    int out_bits = 20;
    int prec = out_bits + bit_length(a) + 5;
    DyadicReal x = DyadicReal::truncation_of(x_true, prec);
    FracMulResult got = frac_mul(a, x, out_bits);
    Rat truth = frac_rat(Rat(a) * x_true);
    CHECK(circle_dist(truth, got.value.to_rational()) < got.error_bound);
  }
}

TEST_CASE("e_of quarter turns are exact") {
  CHECK(e_of(Rat(0)) == Complex(1.0, 0.0));
  CHECK(e_of(Rat(1, 2)) == Complex(-1.0, 0.0));
  CHECK(e_of(Rat(1, 4)) == Complex(0.0, 1.0));
  CHECK(e_of(Rat(3, 4)) == Complex(0.0, -1.0));
  // quad variant too (the Fourier product relies on exact zeros)
  QComplex q = e_of_quad(Rat(1, 2));
  CHECK(q.re == -1);
  CHECK(q.im == 0);
}

TEST_CASE("e_of known values within 1e-15") {
  Complex v = e_of(Rat(1, 8));
  CHECK(std::abs(v.real() - 0.70710678118654752) < 1e-15);
  CHECK(std::abs(v.imag() - 0.70710678118654752) < 1e-15);
  Complex w = e_of(Rat(1, 3));
  CHECK(std::abs(w.real() - (-0.5)) < 1e-15);
  CHECK(std::abs(w.imag() - 0.86602540378443865) < 1e-15);
  // |e| = 1 on assorted arguments
  for (int t = 1; t < 200; ++t) {
    Complex z = e_of(Rat(t, 211));
    CHECK(std::abs(std::abs(z) - 1.0) < 1e-14);
  }
}

TEST_CASE("e_of multiplicativity") {
  for (int c = 0; c < 1000; ++c) {
    Rat x(rng_word(31, 2 * c) % 9973, 9973);
    Rat y(rng_word(31, 2 * c + 1) % 9973, 9973);
    Complex lhs = e_of(x) * e_of(y);
    Complex rhs = e_of(frac_rat(x + y));
    CHECK(std::abs(lhs - rhs) < 5e-15);
  }
}

TEST_CASE("e_of lower bound |e(x) - 1| >= 2 pi x / sqrt(2) near 0") {
  // |e^{i t} - 1| = 2 sin(t/2) >= t/sqrt(2) for t in [0,1]; here t = 2 pi x.
  for (int t = 1; t <= 1000; ++t) {
    Rat x(t, 6290);  // stays below 1/(2 pi)
    double lhs = std::abs(e_of(x) - Complex(1.0, 0.0));
    double rhs = 2.0 * 3.141592653589793 * to_double(x) / std::sqrt(2.0);
    CHECK(lhs >= rhs - 1e-12);
  }
}

TEST_CASE("quad e matches double e") {
  for (int t = 0; t < 500; ++t) {
    Rat x(t, 500);
    QComplex q = e_of_quad(x);
    Complex d = e_of(x);
    CHECK(std::abs(q.re.convert_to<double>() - d.real()) < 2e-15);
    CHECK(std::abs(q.im.convert_to<double>() - d.imag()) < 2e-15);
  }
}

TEST_CASE("digit file round trip") {
  DyadicReal x = DyadicReal::from_bits("0110100110010110");
  std::ostringstream out;
  write_digits(out, x, {"provenance line", "second line"});
  std::istringstream in(out.str());
  DyadicReal back = read_digits(in);
  CHECK(back == x);

  std::istringstream bad("0\n2\n");
  CHECK_THROWS(read_digits(bad));
  std::istringstream empty("# only comments\n");
  CHECK_THROWS(read_digits(empty));
}
