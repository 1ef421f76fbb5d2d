// Deterministic randomness utilities.
//
// All randomness in the library flows from one root seed through named stream
// splits, and the uniform/normal transforms below are implemented by hand so
// that sequences do not depend on standard-library distribution internals.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rmest::rng {

// FNV-1a over the stream name, then SplitMix64 finalization; gives
// well-separated child seeds for (root, name, index) triples.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t root, std::string_view name,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return mix64(mix64(root ^ h) + index);
}

inline std::mt19937_64 make_engine(std::uint64_t root, std::string_view name,
                                   std::uint64_t index = 0) {
  return std::mt19937_64(stream_seed(root, name, index));
}

/// Uniform draw in [0, 1).
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform draw in [lo, hi).
inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

/// Standard normal via Box-Muller (one value per call, no cached state).
inline double normal(std::mt19937_64& g) {
  double u1 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  return n == 0 ? 0 : g() % n;
}

}  // namespace rmest::rng
