#pragma once

// An explicit truncated Schnorr test for uniform-distribution behaviour, and
// the constructor of a computable real passing it.
//
// For a family of integer sequences, level k materializes components
// j = 0..j_max-1, each an over-approximation of
//   A_{i,eps,m} = { x : exists n >= m with |S^i_{n^2}(x)| > eps },
// with per-component budget 2^-(j+k+1), split half/half between what the
// cover may use and what the analytic tail absorbs.  Three certification
// methods:
//
//   analytic-linear  For a_j = c0 + c1*j the closed form gives
//                    |S_N(x)| <= 1 / (2 N dist(c1 x, Z)), so
//                    { dist(c1 x, Z) < 1/(2 m^2 eps) } is an exact superset
//                    valid for *every* n >= m: wrapped balls of radius
//                    1/(2 m^2 eps |c1|) at t/|c1|.  Tail 0, n_cap unbounded.
//
//   grid             For other sequences, evaluate S_{n^2} on a power-of-two
//                    grid fine enough that the derivative bound
//                    |S'| <= 2 pi max|a_j| turns a grid value into a cell
//                    certificate, and mark cells with |S| >= eps - eps/4.
//                    Enumerates n = m upward while the work cap lasts.
//
//   markov-tail      Whatever n the grid cannot reach is absorbed by the
//                    mean-square Markov bound lambda(|S_{n^2}| > eps) <=
//                    1/(n^2 eps^2), summed to 1/(n_cap eps^2).  When not even
//                    n = m is reachable (the grid for 2^n at m = 129 would
//                    need ~2^(m^2) cells), the cover is empty, n_cap = m - 1,
//                    and the tail alone carries the component — which the
//                    choose_m budget guarantees is affordable.
//
// The constructor walks dyadic intervals keeping the exact invariant
//   lambda(I ∩ enumerated covers) + lambda(I) * (total tail) < lambda(I),
// descending into the half with the smaller certified bound (ties go left).
// The emitted left endpoint is finally checked against every cover, so the
// audit guarantee |S^i_{n^2}(x)| <= eps on [m, n_cap] is certified, not
// hoped for.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "equidist/common.hpp"
#include "equidist/config_json.hpp"
#include "equidist/interval_union.hpp"
#include "equidist/parallel.hpp"
#include "equidist/sequences.hpp"
#include "equidist/weyl.hpp"

namespace equidist {

inline constexpr std::int64_t unbounded_n_cap =
    std::numeric_limits<std::int64_t>::max();

// Least m with 1/((m-1) eps^2) <= 2^-(j+k+2): the Markov tail comparison
// sum_{n>=m} 1/(n^2 eps^2) <= 1/((m-1) eps^2) then fits half the component
// budget 2^-(j+k+1), leaving the other half for the cover.
inline std::int64_t choose_m(int j, int k, const Rat& epsilon) {
  if (j < 0 || k < 0) throw std::invalid_argument("choose_m needs j, k >= 0");
  if (epsilon <= 0) throw std::invalid_argument("choose_m needs epsilon > 0");
  Rat need = Rat(pow2(j + k + 2)) / (epsilon * epsilon);
  return 1 + ceil_rat(need).convert_to<std::int64_t>();
}

struct ASetApprox {
  int i = 0;                  // index into the family
  std::string label;          // the sequence's label, for reports
  Rat epsilon;
  std::int64_t m = 0;
  std::int64_t n_cap = 0;     // cover certifies n in [m, n_cap]
  IntervalUnion cover;
  Rat analytic_tail_bound;    // bounds the measure contributed by n > n_cap
  std::string method;         // analytic-linear | grid | markov-tail
};

struct BuildOptions {
  std::int64_t work_cap = 200'000'000;  // grid point-terms per component
  unsigned threads = 1;
};

namespace detail {

// Grid evaluation of S_{n^2} for one n: mark cells whose grid value cannot
// rule out |S| > eps anywhere in the cell.  Returns false (without touching
// `parts`) when the grid needed would blow the remaining work budget.
inline bool grid_mark_one_n(const SequenceSpec& s, std::int64_t n,
                            double eps_d, std::int64_t work_remaining,
                            std::int64_t* work_used, unsigned threads,
                            std::vector<IntervalUnion::Interval>* parts,
                            std::int64_t* grid_out) {
  const std::int64_t N = n * n;
  Int max_abs = s.max_abs_until(N);
  if (bit_length(max_abs) > 40) return false;  // grid beyond any sane cap
  double L = 6.2831853071795872 * to_double(Rat(max_abs)) * (1 + 1e-9);
  double g_min = L / (0.25 * eps_d);  // cell width * L <= eps/4
  if (g_min > 4e18 ||
      static_cast<double>(work_remaining) < g_min * static_cast<double>(N))
    return false;
  std::int64_t G = std::bit_ceil(
      static_cast<std::uint64_t>(std::max(1.0, std::ceil(g_min))));
  if (G > work_remaining / N) return false;

  std::vector<std::uint64_t> residues(static_cast<std::size_t>(N));
  for (std::int64_t j = 0; j < N; ++j) {
    Int r = s.at(j) % G;
    if (r < 0) r += G;
    residues[static_cast<std::size_t>(j)] = r.convert_to<std::uint64_t>();
  }
  const double thr = eps_d * 0.75 - 1e-12;  // eps - eps/4 - evaluation slack
  const double inv_n = 1.0 / static_cast<double>(N);
  const std::uint64_t mask = static_cast<std::uint64_t>(G) - 1;
  // per-chunk runs of marked cells, merged in chunk order
  std::vector<std::pair<std::int64_t, std::int64_t>> runs;
  parallel_chunks<std::vector<std::pair<std::int64_t, std::int64_t>>>(
      static_cast<std::size_t>(G), 1 << 14, threads,
      [&](std::size_t b, std::size_t e) {
        std::vector<std::pair<std::int64_t, std::int64_t>> local;
        for (std::size_t g = b; g < e; ++g) {
          double re = 0, im = 0;
          for (std::uint64_t r : residues) {
            double t = two_pi_d *
                       (static_cast<double>((r * g) & mask) /
                        static_cast<double>(G));
            re += std::cos(t);
            im += std::sin(t);
          }
          if (std::sqrt(re * re + im * im) * inv_n >= thr) {
            std::int64_t gi = static_cast<std::int64_t>(g);
            if (!local.empty() && local.back().second == gi)
              local.back().second = gi + 1;
            else
              local.push_back({gi, gi + 1});
          }
        }
        return local;
      },
      [&](const std::vector<std::pair<std::int64_t, std::int64_t>>& local,
          std::size_t) {
        for (const auto& run : local) {
          if (!runs.empty() && runs.back().second == run.first)
            runs.back().second = run.second;
          else
            runs.push_back(run);
        }
      });
  for (const auto& run : runs)
    parts->push_back({Rat(run.first, G), Rat(run.second, G)});
  *work_used += G * N;
  *grid_out = G;
  return true;
}

}  // namespace detail

inline ASetApprox build_a_set(const SequenceSpec& s, int family_index,
                              const Rat& epsilon, std::int64_t m,
                              const Rat& budget,
                              const BuildOptions& opts = {}) {
  if (epsilon <= 0 || epsilon > 1)
    throw std::invalid_argument("build_a_set needs 0 < epsilon <= 1");
  if (m < 2) throw std::invalid_argument("build_a_set needs m >= 2");
  if (budget <= 0) throw std::invalid_argument("build_a_set needs budget > 0");
  ASetApprox a;
  a.i = family_index;
  a.label = s.label;
  a.epsilon = epsilon;
  a.m = m;

  if (s.is_linear()) {
    Int step = s.linear_step();
    Int c = abs(step);
    Rat radius = Rat(1, 2 * Int(m) * m * c) / epsilon;  // 1/(2 m^2 eps |c|)
    IntervalUnion cover;
    for (Int t = 0; t <= c; ++t)
      cover = IntervalUnion::unite(
          cover, IntervalUnion::wrapped_ball(Rat(t, c), radius));
    a.cover = std::move(cover);
    a.n_cap = unbounded_n_cap;
    a.analytic_tail_bound = 0;
    a.method = "analytic-linear";
  } else {
    ensure_distinct(s, m * m);  // Markov needs the mean square 1/n^2
    double eps_d = to_double(epsilon);
    std::int64_t work_used = 0, grid = 0;
    std::vector<IntervalUnion::Interval> parts;
    std::int64_t n = m;
    while (detail::grid_mark_one_n(s, n, eps_d, opts.work_cap - work_used,
                                   &work_used, opts.threads, &parts, &grid))
      ++n;
    a.n_cap = n - 1;  // last enumerated n; m - 1 when the grid never ran
    a.cover = IntervalUnion::from_intervals(std::move(parts));
    a.analytic_tail_bound = Rat(1, a.n_cap) / (epsilon * epsilon);
    a.method = a.n_cap >= m ? "grid" : "markov-tail";
  }

  if (a.cover.measure() + a.analytic_tail_bound > budget)
    throw BudgetExceeded(
        "A-set for " + a.label + " (eps " + to_string_rat(a.epsilon) +
        ", m " + std::to_string(m) + "): cover " +
        to_string_rat(a.cover.measure()) + " + tail " +
        to_string_rat(a.analytic_tail_bound) + " exceeds budget " +
        to_string_rat(budget) + "; increase m");
  return a;
}

// ----- level assembly -------------------------------------------------------

struct PairAssignment {
  int j = 0;
  int i = 0;
  Rat epsilon;
};

// Diagonal enumeration of (i, eps = 2^-t): weight w = i + t ascending, ties
// by i ascending.  For one sequence this is (0,1/2), (0,1/4), (0,1/8), ...;
// for two it starts (0,1/2), (0,1/4), (1,1/2), (0,1/8), (1,1/4), ...
inline std::vector<PairAssignment> enumerate_pairs(int family_size,
                                                   int j_max) {
  if (family_size < 1 || j_max < 1)
    throw std::invalid_argument("enumerate_pairs needs family and j_max >= 1");
  std::vector<PairAssignment> out;
  for (int w = 1; static_cast<int>(out.size()) < j_max; ++w)
    for (int i = 0; i < family_size && static_cast<int>(out.size()) < j_max;
         ++i) {
      int t = w - i;
      if (t < 1) break;
      out.push_back({static_cast<int>(out.size()), i, pow2_inv(t)});
    }
  return out;
}

struct SchnorrTestLevel {
  int k = 0;
  int j_max = 0;
  std::vector<SequenceSpec> family;
  std::vector<PairAssignment> pair_enumeration;
  std::vector<ASetApprox> components;  // one per j < j_max
  Rat unenumerated_tail;               // 2^-(k+j_max) for the j >= j_max rest
  Rat measure_upper;                   // exact, <= 2^-k
};

inline SchnorrTestLevel build_level(std::vector<SequenceSpec> family, int k,
                                    int j_max, const BuildOptions& opts = {}) {
  if (k < 0) throw std::invalid_argument("build_level needs k >= 0");
  SchnorrTestLevel level;
  level.k = k;
  level.j_max = j_max;
  level.family = std::move(family);
  level.pair_enumeration =
      enumerate_pairs(static_cast<int>(level.family.size()), j_max);
  level.unenumerated_tail = pow2_inv(k + j_max);
  Rat total = level.unenumerated_tail;
  for (const PairAssignment& pa : level.pair_enumeration) {
    Rat budget = pow2_inv(pa.j + k + 1);
    std::int64_t m = choose_m(pa.j, k, pa.epsilon);
    ASetApprox a =
        build_a_set(level.family[static_cast<std::size_t>(pa.i)], pa.i,
                    pa.epsilon, m, budget, opts);
    total += a.cover.measure() + a.analytic_tail_bound;
    level.components.push_back(std::move(a));
  }
  level.measure_upper = total;
  if (level.measure_upper > pow2_inv(k))
    throw BudgetExceeded("level measure " + to_string_rat(level.measure_upper) +
                         " exceeds 2^-" + std::to_string(k));
  return level;
}

// ----- the passing real -----------------------------------------------------

inline DyadicReal construct_passing_real(const SchnorrTestLevel& level,
                                         int out_bits) {
  if (out_bits < 1)
    throw std::invalid_argument("construct_passing_real needs out_bits >= 1");
  if (!(level.measure_upper < 1))
    throw std::invalid_argument("level measure_upper must be < 1");
  Rat tail_total = level.unenumerated_tail;
  for (const auto& c : level.components) tail_total += c.analytic_tail_bound;

  Rat l = 0, width = 1;
  std::string bits;
  bits.reserve(static_cast<std::size_t>(out_bits));
  for (int step = 0; step < out_bits; ++step) {
    Rat half = width / 2;
    Rat mid = l + half;
    Rat cov_left = 0, cov_right = 0;
    for (const auto& c : level.components) {
      cov_left += c.cover.measure_intersect(l, mid);
      cov_right += c.cover.measure_intersect(mid, l + width);
    }
    Rat b_left = cov_left + half * tail_total;
    Rat b_right = cov_right + half * tail_total;
    if (b_left <= b_right) {
      bits.push_back('0');
    } else {
      bits.push_back('1');
      l = mid;
    }
    width = half;
    if ((b_left <= b_right ? b_left : b_right) >= width)
      throw Saturated("certified bound reached the interval width at bit " +
                      std::to_string(step + 1));
  }
  for (const auto& c : level.components)
    if (c.cover.contains(l))
      throw Saturated("constructed endpoint fell on a cover boundary of " +
                      c.label);  // defensive; the invariant excludes interiors
  return DyadicReal::from_bits(bits);
}

// ----- audit ----------------------------------------------------------------

struct AuditRow {
  int j = 0;
  int i = 0;
  std::string label;
  Rat epsilon;
  std::int64_t n = 0;
  double abs_s = 0;
  double allowed = 0;  // epsilon + tracked evaluation error + 1e-9
  bool ok = true;
};

struct AuditReport {
  bool all_ok = true;
  std::int64_t checked = 0;
  std::vector<AuditRow> rows;
};

// Re-verifies |S^i_{n^2}(x)| <= eps_j for every component on n in
// [m_j, min(n_cap_j, n_max)] — the certified range.  Components whose range
// is empty (everything beyond n_max, or tail-only) are skipped.
inline AuditReport audit_level(const SchnorrTestLevel& level,
                               const DyadicReal& x, std::int64_t n_max) {
  AuditReport rep;
  for (std::size_t j = 0; j < level.components.size(); ++j) {
    const ASetApprox& c = level.components[j];
    std::int64_t hi = std::min(c.n_cap, n_max);
    if (hi < c.m) continue;
    const SequenceSpec& s = level.family[static_cast<std::size_t>(c.i)];
    require_precision(s, x, hi * hi);
    WeylSeries series(s, x);
    for (std::int64_t n = c.m; n <= hi; ++n) {
      WeylPoint p = series.at(n * n);
      AuditRow row;
      row.j = static_cast<int>(j);
      row.i = c.i;
      row.label = c.label;
      row.epsilon = c.epsilon;
      row.n = n;
      row.abs_s = std::abs(p.value);
      row.allowed = to_double(c.epsilon) + p.error_bound + 1e-9;
      row.ok = row.abs_s <= row.allowed;
      if (!row.ok) rep.all_ok = false;
      rep.checked += 1;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

// ----- serialization --------------------------------------------------------

inline nlohmann::json level_to_json(const SchnorrTestLevel& level) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t j = 0; j < level.components.size(); ++j) {
    const ASetApprox& c = level.components[j];
    nlohmann::json cover = nlohmann::json::array();
    for (const auto& part : c.cover.parts())
      cover.push_back({{"l", rat_to_json(part.l)}, {"r", rat_to_json(part.r)}});
    comps.push_back({{"j", j},
                     {"i", c.i},
                     {"label", c.label},
                     {"epsilon", rat_to_json(c.epsilon)},
                     {"m", c.m},
                     {"n_cap", c.n_cap},
                     {"method", c.method},
                     {"tail", rat_to_json(c.analytic_tail_bound)},
                     {"cover", std::move(cover)}});
  }
  nlohmann::json family = nlohmann::json::array();
  for (const auto& s : level.family) family.push_back(sequence_to_json(s));
  return {{"format", "equidist-schnorr-level"},
          {"k", level.k},
          {"j_max", level.j_max},
          {"family", std::move(family)},
          {"unenumerated_tail", rat_to_json(level.unenumerated_tail)},
          {"measure_upper", rat_to_json(level.measure_upper)},
          {"components", std::move(comps)}};
}

inline SchnorrTestLevel level_from_json(const nlohmann::json& v) {
  if (v.value("format", "") != "equidist-schnorr-level")
    throw std::invalid_argument("not a schnorr level file");
  SchnorrTestLevel level;
  level.k = v.at("k").get<int>();
  level.j_max = v.at("j_max").get<int>();
  for (const auto& s : v.at("family"))
    level.family.push_back(sequence_from_json(s));
  level.unenumerated_tail = rat_from_json(v.at("unenumerated_tail"));
  level.measure_upper = rat_from_json(v.at("measure_upper"));
  Rat total = level.unenumerated_tail;
  for (const auto& cj : v.at("components")) {
    ASetApprox c;
    c.i = cj.at("i").get<int>();
    c.label = cj.at("label").get<std::string>();
    c.epsilon = rat_from_json(cj.at("epsilon"));
    c.m = cj.at("m").get<std::int64_t>();
    c.n_cap = cj.at("n_cap").get<std::int64_t>();
    c.method = cj.at("method").get<std::string>();
    c.analytic_tail_bound = rat_from_json(cj.at("tail"));
    std::vector<IntervalUnion::Interval> parts;
    for (const auto& part : cj.at("cover"))
      parts.push_back(
          {rat_from_json(part.at("l")), rat_from_json(part.at("r"))});
    c.cover = IntervalUnion::from_intervals(std::move(parts));
    level.pair_enumeration.push_back(
        {cj.at("j").get<int>(), c.i, c.epsilon});
    total += c.cover.measure() + c.analytic_tail_bound;
    if (c.i < 0 || c.i >= static_cast<int>(level.family.size()))
      throw std::invalid_argument("component family index out of range");
    level.components.push_back(std::move(c));
  }
  if (total != level.measure_upper)
    throw std::invalid_argument(
        "level file inconsistent: recorded measure_upper differs from the "
        "recomputed cover + tail total");
  if (level.measure_upper > pow2_inv(level.k))
    throw std::invalid_argument("level file violates the 2^-k bound");
  return level;
}

inline void save_level(const SchnorrTestLevel& level, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << level_to_json(level).dump(1) << "\n";
}

inline SchnorrTestLevel load_level(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json v;
  in >> v;
  return level_from_json(v);
}

}  // namespace equidist
