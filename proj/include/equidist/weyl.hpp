#pragma once

// Weyl sums S_n(x) = (1/n) * sum_{j<n} e(a_j x) over truncated binary x,
// with tracked error bounds, plus the statistics built on them: the Weyl
// criterion sums, the square-index sandwich check, digit-block frequencies,
// and the symbolic / Monte-Carlo mean-square diagnostics.
//
// Arguments {a_j x} come from the exact digit path (frac_mul, 40 output bits
// by default); each term's argument error is |a_j|*2^-precision + 2^-out_bits
// and converts to a complex error of at most 2*pi times that.  Negative a_j
// use the mirror identity {-a x} = 1 - {a x} (mod 1).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "equidist/common.hpp"
#include "equidist/discrepancy.hpp"
#include "equidist/dyadic.hpp"
#include "equidist/parallel.hpp"
#include "equidist/rng.hpp"
#include "equidist/sequences.hpp"

namespace equidist {

inline constexpr int default_out_bits = 40;
inline constexpr double two_pi_d = 6.283185307179586;
// per-term slack for e() evaluation and summation rounding
inline constexpr double eval_slack = 5e-16;

struct WeylPoint {
  std::int64_t n = 0;
  Complex value;         // S_n
  double error_bound = 0;  // |computed - true S_n| <= this
};

// Incremental partial sums for one (sequence, x) pair; advance never rewinds.
class WeylSeries {
 public:
  WeylSeries(SequenceSpec s, DyadicReal x, int out_bits = default_out_bits)
      : s_(std::move(s)), x_(std::move(x)), out_bits_(out_bits) {}

  // S_n with its error bound; n must not decrease across calls.
  WeylPoint at(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("weyl sum needs n >= 1");
    if (n < j_)
      throw std::logic_error("WeylSeries cannot rewind; make a new series");
    ensure_distinct(s_, n);
    advance_to(n);
    WeylPoint p;
    p.n = n;
    double inv = 1.0 / static_cast<double>(n);
    p.value = Complex(sum_re_ * inv, sum_im_ * inv);
    p.error_bound = err_ * inv;
    return p;
  }

  // Exact rational argument {a_j x_low} truncated to out_bits (used both for
  // the sum terms and for building mod-1 point sets).
  Rat term_argument(std::int64_t j, Rat* err_out = nullptr) {
    Int a = s_.at(j);
    bool neg = a < 0;
    FracMulResult fm = frac_mul(abs(a), x_, out_bits_);
    Rat r = fm.value.to_rational();
    if (neg && r != 0) r = 1 - r;
    if (err_out) *err_out = fm.error_bound;
    return r;
  }

  const SequenceSpec& sequence() const { return s_; }
  const DyadicReal& x() const { return x_; }

 private:
  void advance_to(std::int64_t n) {
    for (; j_ < n; ++j_) {
      Rat err;
      Rat arg = term_argument(j_, &err);
      Complex t = e_of(arg);
      sum_re_ += t.real();
      sum_im_ += t.imag();
      err_ += two_pi_d * to_double(err) + eval_slack;
    }
  }

  SequenceSpec s_;
  DyadicReal x_;
  int out_bits_;
  std::int64_t j_ = 0;
  double sum_re_ = 0, sum_im_ = 0, err_ = 0;
};

// Fail fast when the digit stream is too short for every index < n.
inline void require_precision(const SequenceSpec& s, const DyadicReal& x,
                              std::int64_t n, int out_bits = default_out_bits) {
  int need = out_bits + bit_length(s.max_abs_until(n));
  if (x.precision() < need)
    throw InsufficientPrecision("sequence " + s.label + " at n = " +
                                std::to_string(n) + " needs precision >= " +
                                std::to_string(need) + ", have " +
                                std::to_string(x.precision()));
}

inline WeylPoint weyl_sum(const SequenceSpec& s, const DyadicReal& x,
                          std::int64_t n, int out_bits = default_out_bits) {
  require_precision(s, x, n, out_bits);
  WeylSeries series(s, x, out_bits);
  return series.at(n);
}

// All partial sums S_1..S_n in one pass.
inline std::vector<WeylPoint> weyl_partials(const SequenceSpec& s,
                                            const DyadicReal& x,
                                            std::int64_t n,
                                            int out_bits = default_out_bits) {
  require_precision(s, x, n, out_bits);
  WeylSeries series(s, x, out_bits);
  std::vector<WeylPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t m = 1; m <= n; ++m) out.push_back(series.at(m));
  return out;
}

// Weyl criterion sum for multiplier h: S of the pointwise h-multiple.
inline WeylPoint weyl_criterion_sum(const SequenceSpec& s, const DyadicReal& x,
                                    const Int& h, std::int64_t n,
                                    int out_bits = default_out_bits) {
  return weyl_sum(SequenceSpec::multiple_spec(h, s), x, n, out_bits);
}

// The point set ({a_j x})_{j<n} as exact rationals (for discrepancy).
inline std::vector<Rat> points_mod1(const SequenceSpec& s, const DyadicReal& x,
                                    std::int64_t n,
                                    int out_bits = default_out_bits) {
  require_precision(s, x, n, out_bits);
  ensure_distinct(s, n);
  WeylSeries series(s, x, out_bits);
  std::vector<Rat> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) pts.push_back(series.term_argument(j));
  return pts;
}

// Sandwich check around the square index n^2: for every m in [n^2, (n+1)^2),
// |S_m| must not exceed |S_{n^2}| + 2/sqrt(n), up to the tracked evaluation
// errors.  (The inequality is exact for true values; the slack only covers
// what we cannot see through truncation.)
struct SandwichRow {
  std::int64_t m = 0;
  double abs_s_m = 0;
  double allowed = 0;  // |S_{n^2}| + 2/sqrt(n) + error slack
  bool ok = true;
};

struct SandwichReport {
  std::int64_t n = 0;
  double abs_s_square = 0;
  bool all_ok = true;
  std::vector<SandwichRow> rows;
};

inline SandwichReport sandwich_check(const SequenceSpec& s, const DyadicReal& x,
                                     std::int64_t n,
                                     int out_bits = default_out_bits) {
  if (n < 1) throw std::invalid_argument("sandwich_check needs n >= 1");
  require_precision(s, x, (n + 1) * (n + 1) - 1, out_bits);
  WeylSeries series(s, x, out_bits);
  WeylPoint ref = series.at(n * n);
  SandwichReport rep;
  rep.n = n;
  rep.abs_s_square = std::abs(ref.value);
  double bound = rep.abs_s_square + 2.0 / std::sqrt(static_cast<double>(n));
  for (std::int64_t m = n * n; m < (n + 1) * (n + 1); ++m) {
    WeylPoint p = m == n * n ? ref : series.at(m);
    SandwichRow row;
    row.m = m;
    row.abs_s_m = std::abs(p.value);
    row.allowed = bound + p.error_bound + ref.error_bound + 1e-12;
    row.ok = row.abs_s_m <= row.allowed;
    rep.rows.push_back(row);
    if (!row.ok) rep.all_ok = false;
  }
  return rep;
}

// ----- digit-block frequencies ---------------------------------------------

struct BlockFrequencyReport {
  int k = 1;
  std::int64_t n = 0;
  std::map<std::string, std::int64_t> counts;  // k-bit block -> occurrences

  Rat frequency(const std::string& block) const {
    auto it = counts.find(block);
    return Rat(it == counts.end() ? 0 : it->second, n);
  }
};

// Frequencies of k-digit blocks of x read at positions a_0..a_{n-1} (1-based
// digit positions; the block at p covers digits p..p+k-1).  Base 2 only.
inline BlockFrequencyReport block_frequencies(const DyadicReal& x, int b, int k,
                                              const SequenceSpec& positions,
                                              std::int64_t n) {
  if (b != 2)
    throw std::invalid_argument("block_frequencies supports base 2 only");
  if (k < 1 || n < 1)
    throw std::invalid_argument("block_frequencies needs k >= 1, n >= 1");
  ensure_distinct(positions, n);
  BlockFrequencyReport rep;
  rep.k = k;
  rep.n = n;
  for (std::int64_t j = 0; j < n; ++j) {
    Int pos = positions.at(j);
    if (pos < 1)
      throw std::invalid_argument("block positions must be >= 1");
    if (pos + k - 1 > x.precision())
      throw InsufficientPrecision(
          "block at position " + pos.str() + " (k = " + std::to_string(k) +
          ") exceeds precision " + std::to_string(x.precision()));
    int p = pos.convert_to<int>();
    std::string block;
    block.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t)
      block.push_back(static_cast<char>('0' + x.digit(p + t)));
    rep.counts[block] += 1;
  }
  return rep;
}

// ----- mean square ----------------------------------------------------------

// Exact value of the integral of |S_n|^2 over [0,1): the cross terms
// integrate e((a_j - a_k)x) which is 0 unless a_j = a_k, so the integral is
// #{(j,k) : a_j = a_k} / n^2 — equal to 1/n exactly when values are distinct.
inline Rat symbolic_mean_square(const SequenceSpec& s, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("symbolic_mean_square needs n >= 1");
  std::map<Int, Int> mult;
  for (std::int64_t j = 0; j < n; ++j) mult[s.at(j)] += 1;
  Int pairs = 0;
  for (const auto& [v, c] : mult) pairs += c * c;
  return Rat(pairs, Int(n) * n);
}

struct McMeanSquareResult {
  double mean_square = 0;     // average of |S_n(x)|^2 over the samples
  double fraction_above = 0;  // fraction with |S_n(x)| > eps (if eps > 0)
};

// Monte-Carlo estimate of the mean square over uniform 53-bit dyadic x.
// For x = w/2^53 the argument {a_j x} equals ((a_j mod 2^53) * w mod 2^53) /
// 2^53 exactly, so the per-term arguments carry no truncation error at all;
// double sin/cos supply the only (negligible) noise.  Samples are indexed by
// counter, chunked, and merged in chunk order — thread-count independent.
inline McMeanSquareResult mc_mean_square(const SequenceSpec& s, std::int64_t n,
                                         std::int64_t samples,
                                         std::uint64_t seed, double eps = -1,
                                         unsigned threads = 1) {
  ensure_distinct(s, n);
  constexpr std::uint64_t mod53 = 1ull << 53;
  std::vector<std::uint64_t> residues(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) {
    Int r = s.at(j) % mod53;
    if (r < 0) r += mod53;
    residues[static_cast<std::size_t>(j)] = r.convert_to<std::uint64_t>();
  }
  struct Chunk {
    double sum_sq = 0;
    std::int64_t above = 0;
  };
  McMeanSquareResult out;
  double sum_sq = 0;
  std::int64_t above = 0;
  parallel_chunks<Chunk>(
      static_cast<std::size_t>(samples), 4096, threads,
      [&](std::size_t b, std::size_t e) {
        Chunk ch;
        for (std::size_t i = b; i < e; ++i) {
          std::uint64_t w = rng_uniform_bits53(seed, /*stream=*/1, i);
          double re = 0, im = 0;
          for (std::uint64_t r : residues) {
            std::uint64_t arg =
                static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(r) * w)) % mod53;
            double t = two_pi_d * (static_cast<double>(arg) * 0x1p-53);
            re += std::cos(t);
            im += std::sin(t);
          }
          double inv = 1.0 / static_cast<double>(n);
          double sq = (re * re + im * im) * inv * inv;
          ch.sum_sq += sq;
          if (eps > 0 && std::sqrt(sq) > eps) ch.above += 1;
        }
        return ch;
      },
      [&](const Chunk& ch, std::size_t) {
        sum_sq += ch.sum_sq;
        above += ch.above;
      });
  out.mean_square = sum_sq / static_cast<double>(samples);
  out.fraction_above = static_cast<double>(above) / static_cast<double>(samples);
  return out;
}

}  // namespace equidist
