#pragma once

// Counter-based deterministic pseudorandomness.
//
// Everything random in the library is a pure function of (seed, stream,
// counter), so any bit or sample can be regenerated in isolation and results
// do not depend on evaluation order or thread count.  The mixer is the
// standard splitmix64 finalizer; the keying scheme is frozen for 0.1.x:
//
//   word(seed, ctr)        = mix(seed + ctr * PHI64)
//   bit at index i         = top bit of word(seed, i)
//   uniform53(seed, s, c)  = top 53 bits of word(seed ^ mix(s), c) / 2^53

#include <cstdint>

namespace equidist {

inline constexpr std::uint64_t phi64 = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + counter * phi64);
}

// Independent stream selection for multi-purpose use of one user seed.
inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
  return rng_word(seed ^ mix64(stream), counter);
}

inline int rng_bit(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<int>(rng_word(seed, counter) >> 63);
}

// Uniform dyadic rational k/2^53 in [0,1).
inline double rng_uniform53(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t counter) {
  return static_cast<double>(rng_word(seed, stream, counter) >> 11) *
         0x1p-53;
}

inline std::uint64_t rng_uniform_bits53(std::uint64_t seed,
                                        std::uint64_t stream,
                                        std::uint64_t counter) {
  return rng_word(seed, stream, counter) >> 11;
}

}  // namespace equidist
