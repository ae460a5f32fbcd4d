#pragma once

// Integer sequence specifications (a_j) for Weyl sums.
//
// Kinds: polynomial (ascending coefficients), geometric (base^j), primes,
// explicit lists, and h-multiples of another spec.  Values are arbitrary
// precision: geometric(2) at j = 1599 is a 1600-bit integer and that is
// normal usage here.  Distinctness of a_0..a_{n-1} is a precondition of the
// mean-square identity; it is validated lazily per process up to the largest
// index actually used, via a registry keyed by the canonical spec string.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "equidist/common.hpp"

namespace equidist {

struct SequenceSpec {
  enum class Kind { polynomial, geometric, primes, explicit_list, multiple };

  Kind kind = Kind::polynomial;
  std::vector<Int> coeffs;                 // polynomial: a_j = sum c_i j^i
  Int base = 0;                            // geometric
  std::vector<Int> values;                 // explicit_list
  Int h = 1;                               // multiple
  std::shared_ptr<SequenceSpec> inner;     // multiple
  std::string label;

  static SequenceSpec polynomial_spec(std::vector<Int> c, std::string lbl = "") {
    SequenceSpec s;
    s.kind = Kind::polynomial;
    s.coeffs = std::move(c);
    if (s.coeffs.empty()) s.coeffs.push_back(0);
    s.label = lbl.empty() ? default_poly_label(s.coeffs) : std::move(lbl);
    return s;
  }

  static SequenceSpec identity() { return polynomial_spec({0, 1}, "n"); }

  static SequenceSpec geometric_spec(Int b, std::string lbl = "") {
    if (b < 2) throw std::invalid_argument("geometric base must be >= 2");
    SequenceSpec s;
    s.kind = Kind::geometric;
    s.base = b;
    s.label = lbl.empty() ? b.str() + "^n" : std::move(lbl);
    return s;
  }

  static SequenceSpec primes_spec(std::string lbl = "") {
    SequenceSpec s;
    s.kind = Kind::primes;
    s.label = lbl.empty() ? "p_n" : std::move(lbl);
    return s;
  }

  static SequenceSpec explicit_spec(std::vector<Int> vals, std::string lbl = "") {
    SequenceSpec s;
    s.kind = Kind::explicit_list;
    s.values = std::move(vals);
    s.label = lbl.empty()
                  ? "explicit[" + std::to_string(s.values.size()) + "]"
                  : std::move(lbl);
    return s;
  }

  static SequenceSpec multiple_spec(Int h, SequenceSpec in, std::string lbl = "") {
    if (h == 0) throw std::invalid_argument("multiple needs h != 0");
    SequenceSpec s;
    s.kind = Kind::multiple;
    s.h = h;
    s.inner = std::make_shared<SequenceSpec>(std::move(in));
    s.label = lbl.empty() ? h.str() + "*" + s.inner->label : std::move(lbl);
    return s;
  }

  Int at(std::int64_t j) const {
    if (j < 0) throw std::out_of_range("sequence index must be >= 0");
    switch (kind) {
      case Kind::polynomial: {
        // Horner on descending coefficients.
        Int acc = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
          acc = acc * j + *it;
        return acc;
      }
      case Kind::geometric: {
        Int acc = 1;
        Int b = base;
        std::int64_t e = j;
        while (e > 0) {
          if (e & 1) acc *= b;
          b *= b;
          e >>= 1;
        }
        return acc;
      }
      case Kind::primes:
        return nth_prime(j);
      case Kind::explicit_list:
        if (static_cast<std::size_t>(j) >= values.size())
          throw std::out_of_range("explicit sequence has only " +
                                  std::to_string(values.size()) + " values");
        return values[static_cast<std::size_t>(j)];
      case Kind::multiple:
        return h * inner->at(j);
    }
    throw std::logic_error("unhandled sequence kind");
  }

  // max |a_j| for j < n (monotone kinds shortcut; explicit scans).
  Int max_abs_until(std::int64_t n) const {
    if (n <= 0) return 0;
    switch (kind) {
      case Kind::polynomial: {
        // Degree <= 1 is monotone in j, so the endpoints suffice; higher
        // degrees just scan (the callers do O(n) work anyway).
        bool linear = true;
        for (std::size_t i = 2; i < coeffs.size(); ++i)
          if (coeffs[i] != 0) linear = false;
        if (linear) {
          Int m = abs(at(0));
          Int e = abs(at(n - 1));
          return m > e ? m : e;
        }
        Int m = 0;
        for (std::int64_t j = 0; j < n; ++j) {
          Int v = abs(at(j));
          if (v > m) m = v;
        }
        return m;
      }
      case Kind::geometric:
      case Kind::primes:
        return abs(at(n - 1));
      case Kind::explicit_list: {
        Int m = 0;
        for (std::int64_t j = 0; j < n; ++j) {
          Int v = abs(at(j));
          if (v > m) m = v;
        }
        return m;
      }
      case Kind::multiple:
        return abs(h) * inner->max_abs_until(n);
    }
    throw std::logic_error("unhandled sequence kind");
  }

  // True when a_j = c0 + c1*j with c1 != 0 (identity and its relatives).
  // These admit the closed-form geometric-series bound on |S_N|.
  bool is_linear() const {
    const SequenceSpec* s = this;
    while (s->kind == Kind::multiple) s = s->inner.get();
    if (s->kind != Kind::polynomial) return false;
    for (std::size_t i = 2; i < s->coeffs.size(); ++i)
      if (s->coeffs[i] != 0) return false;
    return s->coeffs.size() >= 2 && s->coeffs[1] != 0;
  }

  // For a linear spec, the step a_{j+1} - a_j (includes multiple factors).
  Int linear_step() const {
    if (!is_linear()) throw std::logic_error("linear_step on non-linear spec");
    Int f = 1;
    const SequenceSpec* s = this;
    while (s->kind == Kind::multiple) {
      f *= s->h;
      s = s->inner.get();
    }
    return f * s->coeffs[1];
  }

  // Canonical form; doubles as the distinctness-registry key.
  std::string canonical() const {
    switch (kind) {
      case Kind::polynomial: {
        std::string out = "poly(";
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
          if (i) out += ",";
          out += coeffs[i].str();
        }
        return out + ")";
      }
      case Kind::geometric:
        return "geometric(" + base.str() + ")";
      case Kind::primes:
        return "primes";
      case Kind::explicit_list: {
        std::string out = "explicit(";
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (i) out += ",";
          out += values[i].str();
        }
        return out + ")";
      }
      case Kind::multiple:
        return "multiple(" + h.str() + "," + inner->canonical() + ")";
    }
    throw std::logic_error("unhandled sequence kind");
  }

  // Shared incremental prime cache (0-based: nth_prime(0) = 2).  Concurrent
  // extension is serialized by a mutex; reads take the same lock for
  // simplicity — contention is irrelevant at our scales.
  static Int nth_prime(std::int64_t n) {
    static std::mutex mu;
    static std::vector<std::int64_t> primes;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<std::int64_t>(primes.size()) <= n) {
      std::int64_t cand = primes.empty() ? 2 : primes.back() + 1;
      for (;; ++cand) {
        bool ok = true;
        for (auto p : primes) {
          if (p * p > cand) break;
          if (cand % p == 0) {
            ok = false;
            break;
          }
        }
        if (ok) break;
      }
      primes.push_back(cand);
    }
    return primes[static_cast<std::size_t>(n)];
  }

 private:
  static std::string default_poly_label(const std::vector<Int>& c) {
    if (c.size() == 2 && c[0] == 0 && c[1] == 1) return "n";
    std::string out = "poly(";
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out += ",";
      out += c[i].str();
    }
    return out + ")";
  }
};

// Validate a_0..a_{n-1} pairwise distinct, resuming from previous runs.
// Throws NotDistinct naming the first colliding pair.
inline void ensure_distinct(const SequenceSpec& s, std::int64_t n) {
  // Injective-by-shape fast paths: base^j with base >= 2, primes, and
  // c0 + c1*j with c1 != 0 (each possibly wrapped in nonzero multiples).
  // These must not be enumerated — schnorr tail bounds ask about n = m^2,
  // where a geometric value would have millions of bits.
  {
    const SequenceSpec* p = &s;
    bool h_ok = true;
    while (p->kind == SequenceSpec::Kind::multiple) {
      if (p->h == 0) {
        h_ok = false;
        break;
      }
      p = p->inner.get();
    }
    if (h_ok && (p->kind == SequenceSpec::Kind::geometric ||
                 p->kind == SequenceSpec::Kind::primes || p->is_linear()))
      return;
  }
  struct State {
    std::set<Int> seen;
    std::map<Int, std::int64_t> first_index;
    std::int64_t checked = 0;
  };
  static std::mutex mu;
  static std::map<std::string, State> registry;
  std::lock_guard<std::mutex> lock(mu);
  State& st = registry[s.canonical()];
  for (std::int64_t j = st.checked; j < n; ++j) {
    Int v = s.at(j);
    auto [it, inserted] = st.seen.insert(v);
    if (!inserted)
      throw NotDistinct(s.canonical() + ": a_" + std::to_string(j) + " = a_" +
                        std::to_string(st.first_index[v]) + " = " + v.str());
    st.first_index[v] = j;
    st.checked = j + 1;
  }
}

// Family closure under h-multiples, 2 <= h <= h_max.  Order is pinned:
// originals first, then for each h ascending, each original in order.  The
// (h, member-index) pairs are constructed once each, so no dedup pass is
// needed; closure with h_max <= 1 returns the family unchanged.
inline std::vector<SequenceSpec> close_under_multiples(
    std::vector<SequenceSpec> family, int h_max) {
  std::vector<SequenceSpec> out = family;
  for (int h = 2; h <= h_max; ++h)
    for (const auto& s : family)
      out.push_back(SequenceSpec::multiple_spec(h, s));
  return out;
}

}  // namespace equidist
