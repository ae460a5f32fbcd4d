#pragma once

// Finite unions of half-open intervals [l, r) inside [0, 1), with exact
// rational endpoints.  The representation is kept sorted and disjoint
// (touching intervals are merged), so measure is a plain sum and
// intersection/union are linear sweeps.

#include <algorithm>
#include <utility>
#include <vector>

#include "equidist/common.hpp"

namespace equidist {

class IntervalUnion {
 public:
  struct Interval {
    Rat l, r;  // [l, r), l < r
  };

  IntervalUnion() = default;

  // Build from arbitrary intervals: clip to [0,1), drop empties, sort, merge.
  static IntervalUnion from_intervals(std::vector<Interval> raw) {
    std::vector<Interval> kept;
    for (auto& iv : raw) {
      Rat l = iv.l < 0 ? Rat(0) : iv.l;
      Rat r = iv.r > 1 ? Rat(1) : iv.r;
      if (l < r) kept.push_back({std::move(l), std::move(r)});
    }
    std::sort(kept.begin(), kept.end(),
              [](const Interval& a, const Interval& b) { return a.l < b.l; });
    IntervalUnion u;
    for (auto& iv : kept) {
      if (!u.parts_.empty() && iv.l <= u.parts_.back().r) {
        if (iv.r > u.parts_.back().r) u.parts_.back().r = iv.r;
      } else {
        u.parts_.push_back(iv);
      }
    }
    return u;
  }

  // A ball around c of radius rad, clipped to [0,1) with wraparound: mass
  // that leaves through 0 or 1 reappears at the other end.  This is the shape
  // of {x : dist(x - c, Z) < rad} for c in [0,1].
  static IntervalUnion wrapped_ball(const Rat& c, const Rat& rad) {
    std::vector<Interval> raw;
    raw.push_back({c - rad, c + rad});
    raw.push_back({c - rad + 1, c + rad + 1});
    raw.push_back({c - rad - 1, c + rad - 1});
    return from_intervals(std::move(raw));
  }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }

  Rat measure() const {
    Rat m = 0;
    for (const auto& iv : parts_) m += iv.r - iv.l;
    return m;
  }

  bool contains(const Rat& x) const {
    // binary search on the sorted parts
    std::size_t lo = 0, hi = parts_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (parts_[mid].r <= x)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo < parts_.size() && parts_[lo].l <= x && x < parts_[lo].r;
  }

  static IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> raw = a.parts_;
    raw.insert(raw.end(), b.parts_.begin(), b.parts_.end());
    return from_intervals(std::move(raw));
  }

  // Exact measure of the overlap with [l, r).
  Rat measure_intersect(const Rat& l, const Rat& r) const {
    Rat m = 0;
    for (const auto& iv : parts_) {
      if (iv.r <= l) continue;
      if (iv.l >= r) break;
      const Rat& lo = iv.l > l ? iv.l : l;
      const Rat& hi = iv.r < r ? iv.r : r;
      if (lo < hi) m += hi - lo;
    }
    return m;
  }

  IntervalUnion intersect(const Rat& l, const Rat& r) const {
    std::vector<Interval> out;
    for (const auto& iv : parts_) {
      if (iv.r <= l) continue;
      if (iv.l >= r) break;
      Rat lo = iv.l > l ? iv.l : l;
      Rat hi = iv.r < r ? iv.r : r;
      if (lo < hi) out.push_back({std::move(lo), std::move(hi)});
    }
    IntervalUnion u;
    u.parts_ = std::move(out);
    return u;
  }

 private:
  std::vector<Interval> parts_;
};

}  // namespace equidist
