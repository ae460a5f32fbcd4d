#pragma once

// Command-line driver: one entry point, thirteen subcommands, reproducible
// outputs.
//
//   weyl sum | discrepancy | criterion | blocks | sandwich
//   c sample | check | fourier | lyons | del
//   schnorr build | construct | audit
//
// Every output starts with a '#' provenance header (tool version, exact
// command line, seed where one applies) so a result file identifies the run
// that made it; '#' lines are skipped by the digit reader and by any CSV
// plotter worth using.  JSON outputs carry the same data in a "provenance"
// field instead, since JSON has no comments.
//
// Exit codes: 0 success, 1 domain error (the error's stable name goes to
// stderr), 2 usage error.  `schnorr audit` exits 1 when a certified bound
// fails re-verification; `c check` exits 0 for both verdicts — membership is
// a classification, not a failure.
//
// Same argv + same seed -> byte-identical output: all floating output is
// printed with %.17g from deterministically merged computations, so files
// diff clean across runs and thread counts.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "equidist/common.hpp"
#include "equidist/config_json.hpp"
#include "equidist/digits_io.hpp"
#include "equidist/discrepancy.hpp"
#include "equidist/measure_c.hpp"
#include "equidist/parallel.hpp"
#include "equidist/schnorr.hpp"
#include "equidist/sequences.hpp"
#include "equidist/weyl.hpp"

namespace equidist::cli {

inline std::string fd(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_args(const std::vector<std::string>& args) {
  std::string out = "equidist";
  for (const auto& a : args) out += " " + a;
  return out;
}

// write_digits adds the "# " itself, so digit-file comments stay bare.
inline std::vector<std::string> provenance_bare(const std::string& cmdline) {
  return {"equidist " + std::string(version_string), "command: " + cmdline};
}

inline std::vector<std::string> provenance(const std::string& cmdline) {
  auto lines = provenance_bare(cmdline);
  for (auto& line : lines) line = "# " + line;
  return lines;
}

// Write lines to `path`, or to stdout when path is empty or "-".
inline void emit(const std::string& path,
                 const std::vector<std::string>& lines) {
  if (path.empty() || path == "-") {
    for (const auto& line : lines) std::cout << line << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& line : lines) out << line << "\n";
}

// --x accepts a digit file path or the literal "zero" (4096 zero bits; n up
// to ~2000 for identity-sized sequences fits its precision).
inline DyadicReal load_x(const std::string& arg) {
  if (arg == "zero") return DyadicReal::zeros(4096);
  return read_digits_file(arg);
}

// Cache resolution order: --cache flag, then EQUIDIST_CACHE, then the user
// cache directory ($XDG_CACHE_HOME or ~/.cache).  Empty means no
// persistence (in-memory cache only).
inline std::string resolve_cache_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  std::string env = FourierCache::env_path();
  if (!env.empty()) return env;
  std::string base;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    base = xdg;
  else if (const char* home = std::getenv("HOME"); home && *home)
    base = std::string(home) + "/.cache";
  if (base.empty()) return {};
  std::error_code ec;
  std::filesystem::create_directories(base + "/equidist", ec);
  if (ec) return {};
  return base + "/equidist/mu_hat_cache.csv";
}

// ----- weyl -----------------------------------------------------------------

struct WeylArgs {
  std::string seq = "identity";
  std::string x;
  std::string out;
  std::int64_t n = 0;
  int out_bits = default_out_bits;
  int h_max = 8;
  int k = 1;
  std::string positions = "poly:1,1";  // digit positions a_j = j + 1
};

inline int run_weyl_sum(const WeylArgs& a, const std::string& cmdline) {
  auto s = parse_sequence_string(a.seq);
  auto x = load_x(a.x);
  auto lines = provenance(cmdline);
  lines.push_back("n,re,im,abs,error_bound");
  for (const auto& p : weyl_partials(s, x, a.n, a.out_bits))
    lines.push_back(std::to_string(p.n) + "," + fd(p.value.real()) + "," +
                    fd(p.value.imag()) + "," + fd(std::abs(p.value)) + "," +
                    fd(p.error_bound));
  emit(a.out, lines);
  return 0;
}

inline int run_weyl_discrepancy(const WeylArgs& a,
                                const std::string& cmdline) {
  auto s = parse_sequence_string(a.seq);
  auto x = load_x(a.x);
  auto rep = star_discrepancy(points_mod1(s, x, a.n, a.out_bits));
  auto lines = provenance(cmdline);
  lines.push_back("n,d_star_num,d_star_den");
  lines.push_back(std::to_string(rep.n) + "," + numerator(rep.d_star).str() +
                  "," + denominator(rep.d_star).str());
  emit(a.out, lines);
  return 0;
}

inline int run_weyl_criterion(const WeylArgs& a, const std::string& cmdline) {
  auto s = parse_sequence_string(a.seq);
  auto x = load_x(a.x);
  auto lines = provenance(cmdline);
  lines.push_back("h,re,im,abs,error_bound");
  for (int h = 1; h <= a.h_max; ++h) {
    auto p = weyl_criterion_sum(s, x, h, a.n, a.out_bits);
    lines.push_back(std::to_string(h) + "," + fd(p.value.real()) + "," +
                    fd(p.value.imag()) + "," + fd(std::abs(p.value)) + "," +
                    fd(p.error_bound));
  }
  emit(a.out, lines);
  return 0;
}

inline int run_weyl_blocks(const WeylArgs& a, const std::string& cmdline) {
  auto x = load_x(a.x);
  auto pos = parse_sequence_string(a.positions);
  auto rep = block_frequencies(x, 2, a.k, pos, a.n);
  auto lines = provenance(cmdline);
  lines.push_back("block,count,frequency");
  if (a.k > 20) throw std::invalid_argument("--k too large to enumerate");
  for (std::int64_t b = 0; b < (std::int64_t{1} << a.k); ++b) {
    std::string block;
    for (int t = a.k - 1; t >= 0; --t)
      block.push_back(static_cast<char>('0' + ((b >> t) & 1)));
    auto it = rep.counts.find(block);
    std::int64_t count = it == rep.counts.end() ? 0 : it->second;
    lines.push_back(block + "," + std::to_string(count) + "," +
                    fd(to_double(Rat(count, rep.n))));
  }
  emit(a.out, lines);
  return 0;
}

inline int run_weyl_sandwich(const WeylArgs& a, const std::string& cmdline) {
  auto s = parse_sequence_string(a.seq);
  auto x = load_x(a.x);
  auto rep = sandwich_check(s, x, a.n, a.out_bits);
  auto lines = provenance(cmdline);
  lines.push_back("# |S_{n^2}| = " + fd(rep.abs_s_square) + " at n = " +
                  std::to_string(rep.n));
  lines.push_back("m,abs_s_m,allowed,ok");
  for (const auto& row : rep.rows)
    lines.push_back(std::to_string(row.m) + "," + fd(row.abs_s_m) + "," +
                    fd(row.allowed) + "," + (row.ok ? "true" : "false"));
  emit(a.out, lines);
  return rep.all_ok ? 0 : 1;
}

// ----- c --------------------------------------------------------------------

struct CArgs {
  std::string x;
  std::string out;
  std::string cache;
  std::string seq = "identity";
  std::string measure = "mu";
  std::uint64_t seed = 1;
  std::int64_t bits = 0;
  std::int64_t u_min = 16, u_max = 0;
  std::int64_t m = 1;
  std::int64_t n_max = 0;
  std::int64_t samples = 0;
  int depth_extra = 40;
  unsigned threads = default_thread_count();
};

inline int run_c_sample(const CArgs& a, const std::string& cmdline) {
  auto x = sample_mu(a.seed, static_cast<int>(a.bits));
  auto comments = provenance_bare(cmdline);
  comments.push_back("seed: " + std::to_string(a.seed));
  if (a.out.empty() || a.out == "-")
    write_digits(std::cout, x, comments);
  else
    write_digits_file(a.out, x, comments);
  return 0;
}

inline int run_c_check(const CArgs& a, const std::string& cmdline) {
  auto x = load_x(a.x);
  auto m = is_member(x);
  for (const auto& line : provenance(cmdline)) std::cout << line << "\n";
  if (m.member) {
    std::cout << "member up to precision " << x.precision() << "\n";
  } else {
    std::cout << "not a member: witness n = " << m.witness_n
              << " (source position " << m.source_position.str()
              << ", mirror position " << m.mirror_position.str() << ")\n";
  }
  return 0;  // both verdicts are answers, not failures
}

inline int run_c_fourier(const CArgs& a, const std::string& cmdline) {
  if (a.u_min < 1) throw std::invalid_argument("--u-min must be >= 1");
  if (a.u_max < a.u_min)
    throw std::invalid_argument("--u-max must be >= --u-min");
  FourierCache cache(resolve_cache_path(a.cache));
  auto lines = provenance(cmdline);
  lines.push_back("u,re,im,abs,trunc_bound,bound_128_over_sqrt_u,ok");
  std::size_t count = static_cast<std::size_t>(a.u_max - a.u_min + 1);
  parallel_chunks<std::vector<std::string>>(
      count, 256, a.threads,
      [&](std::size_t b, std::size_t e) {
        std::vector<std::string> rows;
        for (std::size_t i = b; i < e; ++i) {
          Int u = a.u_min + static_cast<std::int64_t>(i);
          auto fc = fourier_coefficient(u, default_depth(u, a.depth_extra),
                                        &cache);
          double bound = 128.0 / std::sqrt(to_double(Rat(u)));
          bool ok = fc.abs() <= bound + fc.truncation_bound + 1e-12;
          rows.push_back(u.str() + "," + fd(fc.value.real()) + "," +
                         fd(fc.value.imag()) + "," + fd(fc.abs()) + "," +
                         fd(fc.truncation_bound) + "," + fd(bound) + "," +
                         (ok ? "true" : "false"));
        }
        return rows;
      },
      [&](const std::vector<std::string>& rows, std::size_t) {
        lines.insert(lines.end(), rows.begin(), rows.end());
      });
  cache.save();
  emit(a.out, lines);
  return 0;
}

inline int run_c_lyons(const CArgs& a, const std::string& cmdline) {
  FourierCache cache(resolve_cache_path(a.cache));
  auto rows = lyons_partial_sums(a.u_max, a.depth_extra, a.threads, &cache);
  cache.save();
  auto lines = provenance(cmdline);
  lines.push_back("U,lower,upper,tail_bound,upper_plus_tail");
  for (const auto& row : rows)
    lines.push_back(row.U.str() + "," + fd(row.lower) + "," + fd(row.upper) +
                    "," + fd(row.tail_bound) + "," +
                    fd(row.upper + row.tail_bound));
  emit(a.out, lines);
  return 0;
}

inline int run_c_del(const CArgs& a, const std::string& cmdline) {
  auto s = parse_sequence_string(a.seq);
  auto rows = del_diagnostic(
      s, Int(a.m), a.n_max, a.samples, a.seed,
      a.measure == "mu" ? DelMeasure::mu : DelMeasure::lebesgue, a.threads);
  auto lines = provenance(cmdline);
  lines.push_back("# seed: " + std::to_string(a.seed));
  lines.push_back("n,estimate,running");
  for (const auto& row : rows)
    lines.push_back(std::to_string(row.n) + "," + fd(row.estimate) + "," +
                    fd(row.running));
  emit(a.out, lines);
  return 0;
}

// ----- schnorr --------------------------------------------------------------

struct SchnorrArgs {
  std::string config;
  std::string test;
  std::string x;
  std::string out;
  int k = 1;
  int j_max = 4;
  std::int64_t bits = 512;
  std::int64_t n_max = 40;
  std::int64_t work_cap = 200'000'000;
  unsigned threads = default_thread_count();
};

inline int run_schnorr_build(const SchnorrArgs& a,
                             const std::string& cmdline) {
  auto cfg = load_family_config(a.config);
  BuildOptions opts;
  opts.work_cap = a.work_cap;
  opts.threads = a.threads;
  auto level = build_level(cfg.closed(), a.k, a.j_max, opts);
  auto j = level_to_json(level);
  j["provenance"] = {{"tool", "equidist " + std::string(version_string)},
                     {"command", cmdline}};
  emit(a.out, {j.dump(1)});
  if (!a.out.empty() && a.out != "-")
    std::cout << "level k=" << level.k << " j_max=" << level.j_max
              << " components=" << level.components.size()
              << " measure_upper=" << to_string_rat(level.measure_upper)
              << " -> " << a.out << "\n";
  return 0;
}

inline int run_schnorr_construct(const SchnorrArgs& a,
                                 const std::string& cmdline) {
  auto level = load_level(a.test);
  auto x = construct_passing_real(level, static_cast<int>(a.bits));
  auto comments = provenance_bare(cmdline);
  comments.push_back("level: k=" + std::to_string(level.k) +
                     " j_max=" + std::to_string(level.j_max) +
                     " measure_upper=" + to_string_rat(level.measure_upper));
  if (a.out.empty() || a.out == "-")
    write_digits(std::cout, x, comments);
  else
    write_digits_file(a.out, x, comments);
  return 0;
}

inline int run_schnorr_audit(const SchnorrArgs& a,
                             const std::string& cmdline) {
  auto level = load_level(a.test);
  auto x = load_x(a.x);
  auto rep = audit_level(level, x, a.n_max);
  auto lines = provenance(cmdline);
  lines.push_back("j,i,label,epsilon_num,epsilon_den,n,abs_s,allowed,ok");
  std::int64_t bad = 0;
  for (const auto& row : rep.rows) {
    if (!row.ok) ++bad;
    lines.push_back(std::to_string(row.j) + "," + std::to_string(row.i) +
                    "," + row.label + "," + numerator(row.epsilon).str() +
                    "," + denominator(row.epsilon).str() + "," +
                    std::to_string(row.n) + "," + fd(row.abs_s) + "," +
                    fd(row.allowed) + "," + (row.ok ? "true" : "false"));
  }
  emit(a.out, lines);
  std::ostream& msg = rep.all_ok ? std::cout : std::cerr;
  msg << (rep.all_ok ? "audit PASS: " : "audit FAIL: ") << rep.checked
      << " rows checked";
  if (!rep.all_ok) msg << ", " << bad << " over epsilon";
  msg << "\n";
  return rep.all_ok ? 0 : 1;
}

// ----- driver ---------------------------------------------------------------

inline int run(std::vector<std::string> args) {
  const std::string cmdline = join_args(args);
  CLI::App app{"Experimental uniform distribution mod one: Weyl sums, star "
               "discrepancy, an explicit truncated Schnorr test, and the "
               "digit-constrained measure on C",
               "equidist"};
  app.require_subcommand(1);
  int code = 0;

  WeylArgs wa;
  auto* weyl = app.add_subcommand("weyl", "Weyl sums and discrepancy");
  weyl->require_subcommand(1);
  auto add_weyl_common = [&](CLI::App* c, bool needs_seq) {
    if (needs_seq)
      c->add_option("--seq", wa.seq,
                    "sequence: identity | primes | geometric:B | "
                    "poly:c0,c1,... | explicit:v,... | multiple:H:<spec>");
    c->add_option("--x", wa.x, "digit file, or 'zero' for 4096 zero bits")
        ->required();
    c->add_option("--out", wa.out, "output CSV (default stdout)");
    c->add_option("--out-bits", wa.out_bits,
                  "per-term argument precision (default 40)");
  };

  auto* wsum = weyl->add_subcommand("sum", "partial Weyl sums S_1..S_n");
  add_weyl_common(wsum, true);
  wsum->add_option("--n", wa.n, "number of terms")->required();
  wsum->callback([&] { code = run_weyl_sum(wa, cmdline); });

  auto* wdisc = weyl->add_subcommand(
      "discrepancy", "exact star discrepancy of (a_j x mod 1)_{j<n}");
  add_weyl_common(wdisc, true);
  wdisc->add_option("--n", wa.n, "number of points")->required();
  wdisc->callback([&] { code = run_weyl_discrepancy(wa, cmdline); });

  auto* wcrit = weyl->add_subcommand(
      "criterion", "Weyl-criterion sums S^(h)_n for h = 1..h_max");
  add_weyl_common(wcrit, true);
  wcrit->add_option("--n", wa.n, "number of terms")->required();
  wcrit->add_option("--h-max", wa.h_max, "largest multiple h (default 8)");
  wcrit->callback([&] { code = run_weyl_criterion(wa, cmdline); });

  auto* wblocks = weyl->add_subcommand(
      "blocks", "k-bit block frequencies at digit positions a_1..a_n");
  add_weyl_common(wblocks, false);
  wblocks->add_option("--n", wa.n, "number of positions")->required();
  wblocks->add_option("--k", wa.k, "block length (default 1)");
  wblocks->add_option("--positions", wa.positions,
                      "position sequence (default poly:1,1, i.e. j+1)");
  wblocks->callback([&] { code = run_weyl_blocks(wa, cmdline); });

  auto* wsand = weyl->add_subcommand(
      "sandwich", "|S_m| <= |S_{n^2}| + 2/sqrt(n) on m in [n^2, (n+1)^2)");
  add_weyl_common(wsand, true);
  wsand->add_option("--n", wa.n, "square-root index n")->required();
  wsand->callback([&] { code = run_weyl_sandwich(wa, cmdline); });

  CArgs ca;
  auto* c = app.add_subcommand("c", "the constrained-digit set C and mu");
  c->require_subcommand(1);

  auto* csample = c->add_subcommand("sample", "draw a mu-distributed real");
  csample->add_option("--seed", ca.seed, "RNG seed (default 1)");
  csample->add_option("--bits", ca.bits, "digits to emit")->required();
  csample->add_option("--out", ca.out, "digit file (default stdout)");
  csample->callback([&] { code = run_c_sample(ca, cmdline); });

  auto* ccheck = c->add_subcommand("check", "is x in C, up to its precision?");
  ccheck->add_option("--x", ca.x, "digit file")->required();
  ccheck->callback([&] { code = run_c_check(ca, cmdline); });

  auto add_cache_opts = [&](CLI::App* sub) {
    sub->add_option("--cache", ca.cache,
                    "mu_hat cache file (default: EQUIDIST_CACHE, then "
                    "~/.cache/equidist/mu_hat_cache.csv)");
    sub->add_option("--depth-extra", ca.depth_extra,
                    "truncation depth beyond bitlength(u) (default 40)");
    sub->add_option("--threads", ca.threads,
                    "worker cap (default: hardware; result is thread-count "
                    "independent)");
  };

  auto* cfourier = c->add_subcommand(
      "fourier", "mu_hat(u) sweep with the 2^7/sqrt(u) bound check");
  cfourier->add_option("--u-min", ca.u_min, "first u (default 16)");
  cfourier->add_option("--u-max", ca.u_max, "last u")->required();
  cfourier->add_option("--out", ca.out, "output CSV (default stdout)");
  add_cache_opts(cfourier);
  cfourier->callback([&] { code = run_c_fourier(ca, cmdline); });

  auto* clyons = c->add_subcommand(
      "lyons", "partial sums of sum |mu_hat(u)|/u with tail bound");
  clyons->add_option("--u-max", ca.u_max, "sum up to this u")->required();
  clyons->add_option("--out", ca.out, "output CSV (default stdout)");
  add_cache_opts(clyons);
  clyons->callback([&] { code = run_c_lyons(ca, cmdline); });

  auto* cdel = c->add_subcommand(
      "del", "Davenport-Erdos-LeVeque diagnostic: integral |S^m_n|^2 dmu");
  cdel->add_option("--seq", ca.seq, "sequence (default identity)");
  cdel->add_option("--m", ca.m, "Weyl-criterion multiple m (default 1)");
  cdel->add_option("--n-max", ca.n_max, "largest n")->required();
  cdel->add_option("--samples", ca.samples, "Monte-Carlo samples (>= 100)")
      ->required();
  cdel->add_option("--seed", ca.seed, "RNG seed (default 1)");
  cdel->add_option("--measure", ca.measure, "mu | lebesgue (default mu)")
      ->check(CLI::IsMember({"mu", "lebesgue"}));
  cdel->add_option("--out", ca.out, "output CSV (default stdout)");
  cdel->add_option("--threads", ca.threads, "worker cap");
  cdel->callback([&] { code = run_c_del(ca, cmdline); });

  SchnorrArgs sa;
  auto* schnorr =
      app.add_subcommand("schnorr", "explicit truncated Schnorr test");
  schnorr->require_subcommand(1);

  auto* sbuild = schnorr->add_subcommand(
      "build", "materialize level k of the test for a sequence family");
  sbuild->add_option("--config", sa.config, "family JSON config")->required();
  sbuild->add_option("--k", sa.k, "level index (default 1)");
  sbuild->add_option("--j-max", sa.j_max,
                     "number of components to materialize (default 4)");
  sbuild->add_option("--work-cap", sa.work_cap,
                     "grid point-term budget per component (default 2e8)");
  sbuild->add_option("--threads", sa.threads, "worker cap");
  sbuild->add_option("--out", sa.out, "level JSON (default stdout)");
  sbuild->callback([&] { code = run_schnorr_build(sa, cmdline); });

  auto* sconstruct = schnorr->add_subcommand(
      "construct", "build the computable real passing the level");
  sconstruct->add_option("--test", sa.test, "level JSON from build")
      ->required();
  sconstruct->add_option("--bits", sa.bits, "digits to emit (default 512)");
  sconstruct->add_option("--out", sa.out, "digit file (default stdout)");
  sconstruct->callback([&] { code = run_schnorr_construct(sa, cmdline); });

  auto* saudit = schnorr->add_subcommand(
      "audit", "re-verify |S^i_{n^2}(x)| <= eps on the certified ranges");
  saudit->add_option("--test", sa.test, "level JSON from build")->required();
  saudit->add_option("--x", sa.x, "digit file to audit")->required();
  saudit->add_option("--n-max", sa.n_max, "audit n up to this (default 40)");
  saudit->add_option("--out", sa.out, "output CSV (default stdout)");
  saudit->callback([&] { code = run_schnorr_audit(sa, cmdline); });

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int parse_code = app.exit(e);
    return parse_code == 0 ? 0 : 2;
  } catch (const DomainError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}

inline int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace equidist::cli
