#pragma once

// Brute-force oracles shared by the unit and acceptance suites.  These are
// deliberately independent of the library's computation paths: the measure
// coefficient below enumerates constrained digit prefixes directly instead
// of using the per-position product.

#include <cmath>
#include <complex>
#include <cstdint>

namespace oracles {

// integral of e(u x) dmu over the first 20 digit positions: mirrors sit at
// 2 and 8, the other 18 positions are free and are enumerated exhaustively.
// Truncation error of the oracle itself is at most 2*pi*u*2^-20.
inline std::complex<double> mu_fourier_prefix(std::uint64_t u) {
  constexpr int depth = 20;
  constexpr int free_positions[18] = {1,  3,  4,  5,  6,  7,  9,  10, 11,
                                      12, 13, 14, 15, 16, 17, 18, 19, 20};
  const double two_pi = 6.283185307179586;
  double re = 0, im = 0;
  for (std::uint32_t w = 0; w < (1u << 18); ++w) {
    std::uint64_t prefix = 0;  // 20-bit integer, position i has weight 2^(20-i)
    for (int b = 0; b < 18; ++b)
      if (w & (1u << b)) prefix |= 1ull << (depth - free_positions[b]);
    if (prefix & (1ull << (depth - 1))) prefix |= 1ull << (depth - 2);  // 2 <- 1
    if (prefix & (1ull << (depth - 4))) prefix |= 1ull << (depth - 8);  // 8 <- 4
    std::uint64_t arg = (u * prefix) & ((1ull << depth) - 1);
    double t = two_pi * (static_cast<double>(arg) * 0x1p-20);
    re += std::cos(t);
    im += std::sin(t);
  }
  return {re * 0x1p-18, im * 0x1p-18};
}

}  // namespace oracles
