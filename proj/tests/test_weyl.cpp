// Weyl sums, discrepancy, sandwich, block frequencies, mean square.
//
// Independent oracles used here:
//   * identity sequence a_j = j has the closed form
//       S_n(x) = e(x (n-1)/2) * sin(pi n x) / (n sin(pi x)),
//     evaluated in long double;
//   * star discrepancy via the raw sup definition (left value and right limit
//     of the c.d.f. deviation at every point), exact rational;
//   * block counts recomputed with a plain string scan.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "equidist/weyl.hpp"

using namespace equidist;

static DyadicReal make_x(const Rat& r, int bits) {
  return DyadicReal::truncation_of(r, bits);
}

static long double to_ld(const Rat& r) {
  return numerator(r).convert_to<long double>() /
         denominator(r).convert_to<long double>();
}

// Closed-form S_n for a_j = j at rational x (long double throughout).
static Complex identity_oracle(const Rat& x, std::int64_t n) {
  long double xv = to_ld(frac_rat(x));
  if (xv == 0.0L) return Complex(1, 0);
  const long double pi = 3.14159265358979323846L;
  long double mag = std::sin(pi * static_cast<long double>(n) * xv) /
                    (static_cast<long double>(n) * std::sin(pi * xv));
  long double phase = pi * xv * static_cast<long double>(n - 1);
  return Complex(static_cast<double>(mag * std::cos(phase)),
                 static_cast<double>(mag * std::sin(phase)));
}

// Raw sup-definition star discrepancy (handles ties by grouping).
static Rat discrepancy_oracle(std::vector<Rat> pts) {
  std::sort(pts.begin(), pts.end());
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  Rat best = 0;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j < pts.size() && pts[j] == pts[i]) ++j;
    // F(t) = #{x < t}/n - t; left value at x_i uses count i, the limit from
    // the right uses count j (all copies included)
    Rat left = pts[i] - Rat(i, n);           // -F at t = x_i
    Rat right = Rat(j, n) - pts[i];          // +F just above x_i
    if (left > best) best = left;
    if (right > best) best = right;
    i = j;
  }
  return best;
}

TEST_CASE("weyl sum at x = 0 is exactly 1") {
  DyadicReal x = DyadicReal::zeros(64);
  WeylSeries s(SequenceSpec::identity(), x);
  for (std::int64_t n = 1; n <= 20; ++n) {
    WeylPoint p = s.at(n);
    CHECK(p.value == Complex(1, 0));
    CHECK(p.error_bound < 1e-9);
  }
}

TEST_CASE("weyl sum frozen exact values") {
  // identity at 1/2: terms alternate +1, -1 via exact half turns
  DyadicReal half = make_x(Rat(1, 2), 50);
  CHECK(weyl_sum(SequenceSpec::identity(), half, 4).value == Complex(0, 0));
  CHECK(weyl_sum(SequenceSpec::identity(), half, 5).value ==
        Complex(1.0 / 5.0, 0));
  // identity at 1/4, n = 4: 1 + i - 1 - i = 0 via exact quarter turns
  DyadicReal quarter = make_x(Rat(1, 4), 50);
  CHECK(weyl_sum(SequenceSpec::identity(), quarter, 4).value == Complex(0, 0));
}

TEST_CASE("weyl sum matches the identity closed form") {
  for (const Rat& r :
       {Rat(1, 3), Rat(1, 7), Rat(5, 13), Rat(61, 128), Rat(355, 1024)}) {
    DyadicReal x = make_x(r, 100);
    Rat xr = x.to_rational();
    WeylSeries series(SequenceSpec::identity(), x);
    for (std::int64_t n : {1, 2, 3, 5, 8, 13, 21, 34, 55}) {
      WeylPoint p = series.at(n);
      Complex want = identity_oracle(xr, n);
      CHECK(std::abs(p.value - want) <= p.error_bound + 1e-9);
    }
  }
}

TEST_CASE("negative multiplier conjugates the sum") {
  DyadicReal x = make_x(Rat(47, 101), 120);
  auto plus = weyl_sum(SequenceSpec::identity(), x, 30);
  auto minus =
      weyl_sum(SequenceSpec::multiple_spec(-1, SequenceSpec::identity()), x, 30);
  CHECK(std::abs(minus.value - std::conj(plus.value)) < 1e-12);
}

TEST_CASE("criterion sum with h = 1 equals the plain sum") {
  DyadicReal x = make_x(Rat(2, 7), 120);
  auto a = weyl_sum(SequenceSpec::geometric_spec(2), x, 16);
  auto b = weyl_criterion_sum(SequenceSpec::geometric_spec(2), x, 1, 16);
  CHECK(a.value == b.value);
  CHECK(a.error_bound == b.error_bound);
}

TEST_CASE("geometric(2) near one third") {
  // At x = 1/3 the arguments 2^j/3 alternate 1/3, 2/3, so S_{2m} = -1/2;
  // with h = 3 every argument is an integer and S_n = 1.
  DyadicReal x = make_x(Rat(1, 3), 200);
  auto s = weyl_sum(SequenceSpec::geometric_spec(2), x, 64);
  CHECK(std::abs(s.value - Complex(-0.5, 0)) <= s.error_bound + 1e-9);
  auto h3 = weyl_criterion_sum(SequenceSpec::geometric_spec(2), x, 3, 64);
  CHECK(std::abs(h3.value - Complex(1, 0)) <= h3.error_bound + 1e-9);
}

TEST_CASE("partials agree with single sums") {
  DyadicReal x = make_x(Rat(9, 64), 80);
  auto parts = weyl_partials(SequenceSpec::identity(), x, 12);
  REQUIRE(parts.size() == 12);
  for (std::int64_t n : {1, 5, 12}) {
    auto single = weyl_sum(SequenceSpec::identity(), x, n);
    CHECK(parts[static_cast<std::size_t>(n - 1)].value == single.value);
  }
}

TEST_CASE("series refuses to rewind, sums validate n") {
  DyadicReal x = make_x(Rat(1, 3), 80);
  WeylSeries s(SequenceSpec::identity(), x);
  s.at(5);
  CHECK_THROWS_AS(s.at(3), std::logic_error);
  CHECK_THROWS_AS(s.at(0), std::invalid_argument);
}

TEST_CASE("precision requirements are enforced") {
  DyadicReal x = make_x(Rat(1, 3), 45);
  CHECK_THROWS_AS(weyl_sum(SequenceSpec::geometric_spec(2), x, 10),
                  InsufficientPrecision);
  CHECK_THROWS_AS(
      weyl_criterion_sum(SequenceSpec::identity(), x, Int(1) << 30, 4),
      InsufficientPrecision);
  // 45 bits handle identity up to n = 32 (needs 40 + 5)
  CHECK_NOTHROW(weyl_sum(SequenceSpec::identity(), x, 32));
}

TEST_CASE("star discrepancy frozen values") {
  CHECK(star_discrepancy({Rat(0)}).d_star == 1);
  CHECK(star_discrepancy({Rat(1, 2)}).d_star == Rat(1, 2));
  for (int n : {1, 2, 5, 10, 37}) {
    std::vector<Rat> mid;
    for (int i = 0; i < n; ++i) mid.push_back(Rat(2 * i + 1, 2 * n));
    CHECK(star_discrepancy(mid).d_star == Rat(1, 2 * n));
  }
  CHECK_THROWS_AS(star_discrepancy({}), std::invalid_argument);
  CHECK_THROWS_AS(star_discrepancy({Rat(1)}), std::invalid_argument);
  CHECK_THROWS_AS(star_discrepancy({Rat(-1, 2)}), std::invalid_argument);
}

TEST_CASE("star discrepancy equals the sup-definition oracle") {
  for (int c = 0; c < 300; ++c) {
    std::uint64_t seed = 9000 + static_cast<unsigned>(c);
    int n = 1 + static_cast<int>(rng_word(seed, 0) % 150);
    int den = 2 + static_cast<int>(rng_word(seed, 1) % 996);
    std::vector<Rat> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back(
          Rat(rng_word(seed, 2 + static_cast<unsigned>(i)) % den, den));
    auto rep = star_discrepancy(pts);
    REQUIRE(rep.d_star == discrepancy_oracle(pts));
    CHECK(rep.worst_deviation == rep.d_star);
    CHECK(rep.d_star > 0);
    CHECK(rep.d_star <= 1);
  }
}

TEST_CASE("points_mod1 feeds exact discrepancy") {
  // a_j = j at x = 1/8: points cycle through the eighths, D*_8 = 1/8
  DyadicReal x = make_x(Rat(1, 8), 60);
  auto pts = points_mod1(SequenceSpec::identity(), x, 8);
  REQUIRE(pts.size() == 8);
  CHECK(star_discrepancy(pts).d_star == Rat(1, 8));
}

TEST_CASE("sandwich holds around square indices") {
  for (int c = 0; c < 20; ++c) {
    std::string bits;
    for (int i = 0; i < 600; ++i)
      bits.push_back(static_cast<char>(
          '0' + rng_bit(400 + static_cast<unsigned>(c),
                        static_cast<unsigned>(i))));
    DyadicReal x = DyadicReal::from_bits(bits);
    auto rep = sandwich_check(SequenceSpec::identity(), x, 3 + c % 4);
    CHECK(rep.all_ok);
    std::int64_t n = rep.n;
    REQUIRE(static_cast<std::int64_t>(rep.rows.size()) == 2 * n + 1);
    for (const auto& row : rep.rows) CHECK(row.ok);
  }
  // degenerate n = 1 still covers m = 1..3
  auto one = sandwich_check(SequenceSpec::identity(), make_x(Rat(1, 3), 80), 1);
  CHECK(one.rows.size() == 3);
  CHECK(one.all_ok);
}

TEST_CASE("symbolic mean square") {
  for (std::int64_t n = 1; n <= 64; ++n) {
    CHECK(symbolic_mean_square(SequenceSpec::identity(), n) == Rat(1, n));
    CHECK(symbolic_mean_square(SequenceSpec::geometric_spec(2), n) == Rat(1, n));
  }
  // repeated values raise the integral: {1,1,2} has 2^2 + 1 ordered pairs
  CHECK(symbolic_mean_square(SequenceSpec::explicit_spec({1, 1, 2}), 3) ==
        Rat(5, 9));
  CHECK(symbolic_mean_square(SequenceSpec::polynomial_spec({5}), 4) == 1);
}

TEST_CASE("mc mean square matches a closed-form recount") {
  const std::int64_t n = 8, samples = 2000;
  const std::uint64_t seed = 123;
  const double eps = 0.3;
  auto mc = mc_mean_square(SequenceSpec::identity(), n, samples, seed, eps);
  long double sum = 0;
  std::int64_t above = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    std::uint64_t w =
        rng_uniform_bits53(seed, 1, static_cast<std::uint64_t>(i));
    Complex s = identity_oracle(Rat(w, Int(1) << 53), n);
    long double sq = static_cast<long double>(std::norm(s));
    sum += sq;
    if (std::sqrt(static_cast<double>(sq)) > eps) ++above;
  }
  double want = static_cast<double>(sum / samples);
  CHECK(std::abs(mc.mean_square - want) < 1e-12);
  CHECK(std::abs(mc.fraction_above -
                 static_cast<double>(above) / static_cast<double>(samples)) <=
        0.001);
}

TEST_CASE("mc mean square concentrates at 1/n and obeys the tail bound") {
  for (std::int64_t n : {4, 16, 64}) {
    double eps = 2.0 / std::sqrt(static_cast<double>(n));
    auto mc = mc_mean_square(SequenceSpec::identity(), n, 50000, 777, eps,
                             default_thread_count());
    double expect = 1.0 / static_cast<double>(n);
    CHECK(std::abs(mc.mean_square - expect) < 0.05 * expect);
    // lambda(|S_n| > eps) <= 1/(n eps^2) = 1/4
    CHECK(mc.fraction_above <= 0.25);
  }
}

TEST_CASE("mc mean square is thread-count invariant") {
  auto a = mc_mean_square(SequenceSpec::geometric_spec(3), 10, 9000, 55, 0.5, 1);
  auto b = mc_mean_square(SequenceSpec::geometric_spec(3), 10, 9000, 55, 0.5, 4);
  CHECK(a.mean_square == b.mean_square);
  CHECK(a.fraction_above == b.fraction_above);
}

TEST_CASE("block frequencies on a periodic word") {
  DyadicReal x = DyadicReal::from_bits("0101010101");
  SequenceSpec pos = SequenceSpec::polynomial_spec({1, 1});  // 1, 2, 3, ...
  auto k1 = block_frequencies(x, 2, 1, pos, 10);
  CHECK(k1.frequency("0") == Rat(1, 2));
  CHECK(k1.frequency("1") == Rat(1, 2));
  auto k2 = block_frequencies(x, 2, 2, pos, 9);
  CHECK(k2.counts.at("01") == 5);
  CHECK(k2.counts.at("10") == 4);
  CHECK(k2.frequency("00") == 0);
  auto zeros = block_frequencies(DyadicReal::zeros(32), 2, 2, pos, 16);
  CHECK(zeros.frequency("00") == 1);
}

TEST_CASE("block frequencies on Thue-Morse match a direct scan") {
  std::string tm;
  for (int i = 0; i < 4096; ++i)
    tm.push_back(static_cast<char>(
        '0' + (__builtin_popcount(static_cast<unsigned>(i)) & 1)));
  DyadicReal x = DyadicReal::from_bits(tm);
  SequenceSpec pos = SequenceSpec::polynomial_spec({1, 1});
  auto k1 = block_frequencies(x, 2, 1, pos, 2048);
  CHECK(k1.frequency("1") == Rat(1, 2));  // balanced on power-of-two prefixes
  auto k3 = block_frequencies(x, 2, 3, pos, 2040);
  std::map<std::string, std::int64_t> oracle;
  for (int j = 0; j < 2040; ++j) oracle[tm.substr(static_cast<unsigned>(j), 3)]++;
  REQUIRE(k3.counts == oracle);
  CHECK(k3.counts.count("000") == 0);  // overlap-free: no 000 or 111
  CHECK(k3.counts.count("111") == 0);
}

TEST_CASE("block frequency validation") {
  DyadicReal x = DyadicReal::from_bits("0101");
  SequenceSpec pos = SequenceSpec::polynomial_spec({1, 1});
  CHECK_THROWS_AS(block_frequencies(x, 3, 1, pos, 2), std::invalid_argument);
  CHECK_THROWS_AS(block_frequencies(x, 2, 0, pos, 2), std::invalid_argument);
  CHECK_THROWS_AS(block_frequencies(x, 2, 2, pos, 4), InsufficientPrecision);
  CHECK_THROWS_AS(
      block_frequencies(x, 2, 1, SequenceSpec::identity(), 2),  // position 0
      std::invalid_argument);
}
