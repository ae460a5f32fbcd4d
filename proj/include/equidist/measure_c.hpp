#pragma once

// The digit-constrained null set C, its uniform measure mu, and the analysis
// built on mu's Fourier-Stieltjes coefficients.
//
// C = { x in [0,1) : digit at 2^(2n+1) equals digit at 2^(2n) for all n }.
// Position 2^(2n) is the source of pair n, position 2^(2n+1) = 2*2^(2n) its
// mirror.  mu is the image of Lebesgue measure under the insertion bijection
// f: free digits are independent fair bits, mirror digits copy their source.
//
// That independence gives an exact product formula for
//   mu_hat(u) = integral of e(u x) dmu(x):
// each free position i <= B contributes (1 + e(u 2^-i))/2, each pair with
// mirror q <= B contributes (1 + e(u (2^-p + 2^-q)))/2, and the positions
// beyond depth B move the integrand by at most 2*pi*u*2^-B (the truncation
// bound carried in every coefficient).  A source whose mirror lies beyond B
// counts as free: conditioned on the first B digits, nothing constrains it.
// Factors are multiplied in quad precision so the product error stays far
// below the truncation bound even for thousands of factors.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "equidist/common.hpp"
#include "equidist/dyadic.hpp"
#include "equidist/parallel.hpp"
#include "equidist/rng.hpp"
#include "equidist/sequences.hpp"
#include "equidist/weyl.hpp"

namespace equidist {

// ----- the constraint pattern ----------------------------------------------

struct ConstraintPattern {
  static Int source(int n) { return Int(1) << (2 * n); }       // 2^(2n)
  static Int mirror(int n) { return Int(1) << (2 * n + 1); }   // 2^(2n+1)

  static bool is_power_of_two(const Int& v) {
    return v > 0 && (v & (v - 1)) == 0;
  }
  // exponent parity decides the role: even -> source, odd -> mirror
  static bool is_mirror_position(const Int& pos) {
    return is_power_of_two(pos) && (bit_length(pos) - 1) % 2 == 1;
  }
  static bool is_source_position(const Int& pos) {
    return is_power_of_two(pos) && (bit_length(pos) - 1) % 2 == 0;
  }

  static int pairs_with_mirror_upto(const Int& bound) {
    int c = 0;
    while (mirror(c) <= bound) ++c;
    return c;
  }
  static Int free_positions_upto(const Int& bound) {
    if (bound < 0) throw std::invalid_argument("bound must be nonnegative");
    return bound - pairs_with_mirror_upto(bound);
  }
};

// mu of the cylinder fixing every digit of a member of C up to `depth`:
// only the free digits carry probability 1/2 each, mirrors come for free.
inline Rat cylinder_measure(const Int& depth) {
  Int free = ConstraintPattern::free_positions_upto(depth);
  Rat m(1);
  for (Int i = 0; i < free; ++i) m /= 2;
  return m;
}

// ----- membership and the bijection f --------------------------------------

struct Membership {
  bool member = true;   // "yes up to precision": no violated pair is visible
  int witness_n = -1;   // least n with both positions visible and unequal
  Int source_position = 0, mirror_position = 0;
};

inline Membership is_member(const DyadicReal& x) {
  for (int n = 0;; ++n) {
    Int q = ConstraintPattern::mirror(n);
    if (q > x.precision()) return {};
    int p = ConstraintPattern::source(n).convert_to<int>();
    if (x.digit(p) != x.digit(q.convert_to<int>()))
      return {false, n, ConstraintPattern::source(n), q};
  }
}

// f: place the bits of y at the free positions in order; every mirror copies
// the (earlier) source digit.  Output ends at the position taking y's last
// bit, so extract_digits inverts it exactly.
inline DyadicReal insert_digits(const std::vector<std::uint8_t>& y) {
  if (y.empty())
    throw std::invalid_argument("insert_digits needs at least one bit");
  std::string bits;
  std::size_t k = 0;
  for (Int pos = 1; k < y.size(); ++pos) {
    if (ConstraintPattern::is_mirror_position(pos)) {
      std::size_t src = (pos / 2).convert_to<std::size_t>();
      bits.push_back(bits[src - 1]);
    } else {
      if (y[k] > 1) throw std::invalid_argument("digits must be 0 or 1");
      bits.push_back(static_cast<char>('0' + y[k++]));
    }
  }
  return DyadicReal::from_bits(bits);
}

inline DyadicReal insert_digits(const DyadicReal& y) {
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(y.precision()));
  for (int i = 1; i <= y.precision(); ++i)
    bits.push_back(static_cast<std::uint8_t>(y.digit(i)));
  return insert_digits(bits);
}

inline std::vector<std::uint8_t> extract_digits(const DyadicReal& x) {
  Membership mem = is_member(x);
  if (!mem.member)
    throw NotInC("pair " + std::to_string(mem.witness_n) + " violated: digit " +
                 mem.source_position.str() + " != digit " +
                 mem.mirror_position.str());
  std::vector<std::uint8_t> y;
  for (Int pos = 1; pos <= x.precision(); ++pos)
    if (!ConstraintPattern::is_mirror_position(pos))
      y.push_back(
          static_cast<std::uint8_t>(x.digit(pos.convert_to<int>())));
  return y;
}

// ----- samplers -------------------------------------------------------------
//
// Frozen for 0.1.x: the bit at (1-based) position i of a uniform sample is
// the top bit of mix64(seed + i * phi64); a mu sample uses the same stream at
// free positions and copies the source digit at mirrors.  Any sampled bit is
// thus reproducible in isolation and samples are prefix-stable in out_bits.

inline DyadicReal sample_uniform(std::uint64_t seed, int out_bits) {
  if (out_bits < 1) throw std::invalid_argument("out_bits must be >= 1");
  std::string bits;
  bits.reserve(static_cast<std::size_t>(out_bits));
  for (int i = 1; i <= out_bits; ++i)
    bits.push_back(
        static_cast<char>('0' + rng_bit(seed, static_cast<unsigned>(i))));
  return DyadicReal::from_bits(bits);
}

inline DyadicReal sample_mu(std::uint64_t seed, int out_bits) {
  if (out_bits < 1) throw std::invalid_argument("out_bits must be >= 1");
  std::string bits;
  bits.reserve(static_cast<std::size_t>(out_bits));
  for (int i = 1; i <= out_bits; ++i) {
    if (ConstraintPattern::is_mirror_position(i))
      bits.push_back(bits[static_cast<std::size_t>(i / 2 - 1)]);
    else
      bits.push_back(
          static_cast<char>('0' + rng_bit(seed, static_cast<unsigned>(i))));
  }
  return DyadicReal::from_bits(bits);
}

// ----- Fourier-Stieltjes coefficients --------------------------------------

struct FourierCoefficient {
  Int u;
  Complex value;
  double truncation_bound = 0;  // |computed - mu_hat(u)| <= this
  int depth_bits = 0;

  double abs() const { return std::abs(value); }
};

inline int default_depth(const Int& u, int depth_extra = 40) {
  return bit_length(u) + depth_extra;
}

inline double mu_truncation_bound(const Int& u, int depth_bits) {
  if (u == 0) return 0.0;
  // rounded-up 2*pi; the 1e-15 absorbs the to_double rounding
  return 6.2831853071795872 * to_double(Rat(u) * pow2_inv(depth_bits)) *
         (1 + 1e-15);
}

// Persistent (u, B) -> value store; file records are "u, B, re, im" with 25
// significant digits, which round-trips doubles exactly.  Thread-safe.
class FourierCache {
 public:
  FourierCache() = default;
  explicit FourierCache(std::string path) : path_(std::move(path)) { load(); }

  static std::string env_path() {
    const char* p = std::getenv("EQUIDIST_CACHE");
    return p == nullptr ? std::string() : std::string(p);
  }

  bool lookup(const Int& u, int depth_bits, Complex* out) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find({u, depth_bits});
    if (it == entries_.end()) return false;
    *out = it->second;
    return true;
  }

  void store(const Int& u, int depth_bits, const Complex& v) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_[{u, depth_bits}] = v;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
  }

  const std::string& path() const { return path_; }

  void save() const {
    if (path_.empty()) return;
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(path_);
    if (!out) throw std::runtime_error("cannot write cache file " + path_);
    out << std::setprecision(25);
    for (const auto& [key, v] : entries_)
      out << key.first << ", " << key.second << ", " << v.real() << ", "
          << v.imag() << "\n";
  }

 private:
  void load() {
    std::ifstream in(path_);
    if (!in) return;  // absent cache file is an empty cache
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      for (char& c : line)
        if (c == ',') c = ' ';
      std::istringstream row(line);
      std::string u_str;
      int depth;
      double re, im;
      if (!(row >> u_str >> depth >> re >> im))
        throw std::runtime_error("bad cache record at " + path_ + ":" +
                                 std::to_string(line_no));
      entries_[{Int(u_str), depth}] = Complex(re, im);
    }
  }

  mutable std::mutex mu_;
  std::map<std::pair<Int, int>, Complex> entries_;
  std::string path_;
};

inline FourierCoefficient fourier_coefficient(const Int& u, int depth_bits,
                                              FourierCache* cache = nullptr) {
  if (u < 0) throw std::invalid_argument("fourier_coefficient needs u >= 0");
  if (depth_bits < 1)
    throw std::invalid_argument("fourier_coefficient needs depth >= 1");
  FourierCoefficient fc;
  fc.u = u;
  fc.depth_bits = depth_bits;
  fc.truncation_bound = mu_truncation_bound(u, depth_bits);
  if (cache != nullptr && cache->lookup(u, depth_bits, &fc.value)) return fc;

  QComplex acc{Quad(1), Quad(0)};
  for (int i = 1; i <= depth_bits; ++i) {
    if (ConstraintPattern::is_mirror_position(i)) continue;  // with its source
    Rat theta;
    if (ConstraintPattern::is_source_position(i) && 2 * Int(i) <= depth_bits)
      theta = Rat(u) * (pow2_inv(i) + pow2_inv(2 * i));  // whole pair visible
    else
      theta = Rat(u) * pow2_inv(i);  // free (or source with mirror beyond B)
    QComplex e = e_of_quad(theta);
    acc *= QComplex{(Quad(1) + e.re) / 2, e.im / 2};
    if (acc.re == 0 && acc.im == 0) break;  // a vanishing factor is exact
  }
  fc.value = Complex(acc.re.convert_to<double>(), acc.im.convert_to<double>());
  if (cache != nullptr) cache->store(u, depth_bits, fc.value);
  return fc;
}

// ----- decay verification ---------------------------------------------------

// u belongs to the sharp subfamily when it is divisible by 2^(2^(2(n+1)) - 1)
// but not by 2^(2^(2(n+1))) for some n >= 0 (n = 0: u = 8 mod 16).  For those
// u the source factor at position 2^(2(n+1)) sits at an exact half turn, and
// one might hope for the tighter envelope 4/sqrt(u).  That constant is not
// attainable: when the next odd block of u's bits lands near a half turn as
// well, the two effects interfere and the ratio |mu_hat(u)|*sqrt(u) exceeds 4
// (first at u = 120, ratio 4.7204, confirmed against the brute-force prefix
// oracle), while staying far below the global 2^7.  The report therefore
// *measures* the subfamily (max ratio, exceedance count) instead of enforcing
// the constant-4 envelope.
inline bool in_sharp_subfamily(const Int& u) {
  if (u <= 0) return false;
  for (int n = 0;; ++n) {
    if (2 * (n + 1) > 30) return false;
    int e = 1 << (2 * (n + 1));  // 4, 16, 64, ...
    if (e > bit_length(u)) return false;
    if (u % (Int(1) << e) == (Int(1) << (e - 1))) return true;
  }
}

struct DecayReport {
  Int u_min, u_max;
  std::int64_t checked = 0;
  double max_ratio = 0;  // max over tested u of |mu_hat(u)| * sqrt(u)
  Int argmax_u = 0;
  std::int64_t subfamily_checked = 0;  // members of the sharp subfamily
  double subfamily_max_ratio = 0;
  Int subfamily_argmax_u = 0;
  std::int64_t subfamily_over_4 = 0;  // subfamily u with |mu_hat| > 4/sqrt(u)
};

// Checks |mu_hat(u)| <= 2^7/sqrt(u) for every u in [u_min, u_max], up to the
// recorded truncation bound plus floating slack.  A violation throws
// BoundViolation: the bound is a theorem, so failure signals an
// implementation bug.  The sharp subfamily is measured, not enforced (see
// in_sharp_subfamily above).
inline DecayReport verify_decay(const Int& u_min, const Int& u_max,
                                int depth_extra = 40, unsigned threads = 1,
                                FourierCache* cache = nullptr) {
  if (u_min < 16) throw std::invalid_argument("verify_decay needs u_min >= 16");
  if (u_max < u_min)
    throw std::invalid_argument("verify_decay needs u_max >= u_min");
  struct Part {
    double max_ratio = 0, sub_max_ratio = 0;
    Int argmax_u = 0, sub_argmax_u = 0;
    std::int64_t sub_checked = 0, sub_over_4 = 0;
    bool violated = false;
    std::string violation;
  };
  DecayReport rep;
  rep.u_min = u_min;
  rep.u_max = u_max;
  rep.checked = (u_max - u_min + 1).convert_to<std::int64_t>();
  bool violated = false;
  std::string violation;
  parallel_chunks<Part>(
      static_cast<std::size_t>(rep.checked), 256, threads,
      [&](std::size_t b, std::size_t e) {
        Part part;
        for (std::size_t i = b; i < e; ++i) {
          Int u = u_min + static_cast<std::int64_t>(i);
          auto fc = fourier_coefficient(u, default_depth(u, depth_extra), cache);
          double root = std::sqrt(to_double(Rat(u)));
          double mag = fc.abs();
          double ratio = mag * root;
          if (ratio > part.max_ratio) {
            part.max_ratio = ratio;
            part.argmax_u = u;
          }
          double slack = fc.truncation_bound + 1e-12;
          if (!part.violated && mag > 128.0 / root + slack) {
            part.violated = true;
            part.violation = "|mu_hat(" + u.str() + ")| = " +
                             std::to_string(mag) + " exceeds 128/sqrt(u)";
          }
          if (in_sharp_subfamily(u)) {
            part.sub_checked += 1;
            if (ratio > part.sub_max_ratio) {
              part.sub_max_ratio = ratio;
              part.sub_argmax_u = u;
            }
            if (mag > 4.0 / root + slack) part.sub_over_4 += 1;
          }
        }
        return part;
      },
      [&](const Part& part, std::size_t) {
        if (part.max_ratio > rep.max_ratio) {
          rep.max_ratio = part.max_ratio;
          rep.argmax_u = part.argmax_u;
        }
        rep.subfamily_checked += part.sub_checked;
        rep.subfamily_over_4 += part.sub_over_4;
        if (part.sub_max_ratio > rep.subfamily_max_ratio) {
          rep.subfamily_max_ratio = part.sub_max_ratio;
          rep.subfamily_argmax_u = part.sub_argmax_u;
        }
        if (part.violated && !violated) {
          violated = true;
          violation = part.violation;
        }
      });
  if (violated) throw BoundViolation(violation);
  return rep;
}

// ----- Lyons partial sums ---------------------------------------------------

struct LyonsRow {
  Int U;
  double lower = 0, upper = 0;  // bracket for sum_{u<=U} |mu_hat(u)|/u
  double tail_bound = 0;        // 2^7 * sum_{u>U} u^(-3/2) <= 2^8/sqrt(U)
};

// Rows at U = powers of two and at u_max; the bracket widens only by the
// truncation bounds, the tail envelope comes from integral comparison.
inline std::vector<LyonsRow> lyons_partial_sums(const Int& u_max,
                                                int depth_extra = 40,
                                                unsigned threads = 1,
                                                FourierCache* cache = nullptr) {
  if (u_max < 1) throw std::invalid_argument("lyons needs u_max >= 1");
  std::int64_t count = u_max.convert_to<std::int64_t>();
  std::vector<double> lo(static_cast<std::size_t>(count)),
      hi(static_cast<std::size_t>(count));
  parallel_chunks<int>(
      static_cast<std::size_t>(count), 256, threads,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          Int u = static_cast<std::int64_t>(i) + 1;
          auto fc = fourier_coefficient(u, default_depth(u, depth_extra), cache);
          double mag = fc.abs(), du = to_double(Rat(u));
          lo[i] = std::max(0.0, mag - fc.truncation_bound) / du;
          hi[i] = (mag + fc.truncation_bound) / du;
        }
        return 0;
      },
      [](int, std::size_t) {});
  std::vector<LyonsRow> rows;
  double run_lo = 0, run_hi = 0;
  for (std::int64_t u = 1; u <= count; ++u) {
    run_lo += lo[static_cast<std::size_t>(u - 1)];
    run_hi += hi[static_cast<std::size_t>(u - 1)];
    if ((u & (u - 1)) == 0 || u == count) {
      LyonsRow row;
      row.U = u;
      row.lower = run_lo;
      row.upper = run_hi;
      row.tail_bound = 256.0 / std::sqrt(static_cast<double>(u));
      rows.push_back(row);
    }
  }
  return rows;
}

// ----- Davenport-Erdos-LeVeque diagnostic ----------------------------------

enum class DelMeasure { mu, lebesgue };

struct DelRow {
  std::int64_t n = 0;
  double estimate = 0;  // Monte-Carlo integral of |S^m_n|^2 d(measure)
  double running = 0;   // sum over nu <= n of estimate(nu)/nu
};

// Estimates integral |S^m_n|^2 dmu for n = 1..n_max by averaging over
// `samples` mu-samples (sample i uses seed word (seed, stream 2 or 3, i)).
// The per-sample partial sums are incremental, so the whole table costs
// samples * n_max terms.
inline std::vector<DelRow> del_diagnostic(const SequenceSpec& s, const Int& m,
                                          std::int64_t n_max,
                                          std::int64_t samples,
                                          std::uint64_t seed,
                                          DelMeasure measure = DelMeasure::mu,
                                          unsigned threads = 1) {
  if (m == 0) throw std::invalid_argument("del_diagnostic needs m != 0");
  if (n_max < 1) throw std::invalid_argument("del_diagnostic needs n_max >= 1");
  if (samples < 100)
    throw std::invalid_argument("del_diagnostic needs samples >= 100");
  SequenceSpec seq = SequenceSpec::multiple_spec(m, s);
  ensure_distinct(seq, n_max);
  int prec = default_out_bits + bit_length(seq.max_abs_until(n_max));
  std::vector<double> sums(static_cast<std::size_t>(n_max), 0.0);
  parallel_chunks<std::vector<double>>(
      static_cast<std::size_t>(samples), 16, threads,
      [&](std::size_t b, std::size_t e) {
        std::vector<double> part(static_cast<std::size_t>(n_max), 0.0);
        for (std::size_t i = b; i < e; ++i) {
          std::uint64_t draw =
              rng_word(seed, measure == DelMeasure::mu ? 2 : 3, i);
          DyadicReal x = measure == DelMeasure::mu ? sample_mu(draw, prec)
                                                   : sample_uniform(draw, prec);
          WeylSeries series(seq, x);
          for (std::int64_t n = 1; n <= n_max; ++n)
            part[static_cast<std::size_t>(n - 1)] +=
                std::norm(series.at(n).value);
        }
        return part;
      },
      [&](const std::vector<double>& part, std::size_t) {
        for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += part[k];
      });
  std::vector<DelRow> rows;
  double running = 0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    DelRow row;
    row.n = n;
    row.estimate =
        sums[static_cast<std::size_t>(n - 1)] / static_cast<double>(samples);
    running += row.estimate / static_cast<double>(n);
    row.running = running;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace equidist
