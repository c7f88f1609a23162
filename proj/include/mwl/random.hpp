#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mwl {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds from one
// master seed so that no stream depends on scheduling order.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(mix64(base) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform on [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller, one draw per call.
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Stream ids for derive_seed.
namespace stream {
inline constexpr std::uint64_t kScene = 1;
inline constexpr std::uint64_t kInitialGuess = 2;
inline constexpr std::uint64_t kProfile = 3;
inline constexpr std::uint64_t kNoise = 4;
}  // namespace stream

}  // namespace mwl
