#pragma once

// Exact star discrepancy of a finite point set in [0,1).
//
// For sorted x_(0) <= ... <= x_(N-1),
//   D*_N = max_i max( (i+1)/N - x_(i),  x_(i) - i/N ),
// the classical closed form for sup_t |#{x_i < t}/N - t| over t in [0,1].
// Everything is exact rational; ties in the max report the leftmost point.

#include <algorithm>
#include <vector>

#include "equidist/common.hpp"

namespace equidist {

struct DiscrepancyReport {
  std::int64_t n = 0;
  Rat d_star;
  Rat worst_point;      // sorted point where the max deviation occurs
  Rat worst_deviation;  // == d_star
};

inline DiscrepancyReport star_discrepancy(std::vector<Rat> points) {
  if (points.empty())
    throw std::invalid_argument("star_discrepancy needs at least one point");
  for (const auto& p : points)
    if (p < 0 || p >= 1)
      throw std::invalid_argument("star_discrepancy points must be in [0,1)");
  std::sort(points.begin(), points.end());
  const std::int64_t n = static_cast<std::int64_t>(points.size());
  DiscrepancyReport rep;
  rep.n = n;
  rep.d_star = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Rat& x = points[static_cast<std::size_t>(i)];
    Rat up = Rat(i + 1, n) - x;   // deficit just below the (i+1)-quantile
    Rat down = x - Rat(i, n);     // excess at x itself
    const Rat& dev = up > down ? up : down;
    if (dev > rep.d_star) {
      rep.d_star = dev;
      rep.worst_point = x;
      rep.worst_deviation = dev;
    }
  }
  return rep;
}

}  // namespace equidist
