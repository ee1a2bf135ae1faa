#pragma once

#include <cstdint>
#include <random>

#include "cheblr/matrix.hpp"

namespace cheblr {

/// Engine used everywhere a seed is accepted. Stream splitting: the k-th
/// independent stream derived from a base seed is seeded with
/// derive_seed(base, k), i.e. two rounds of SplitMix64 over base and k.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName =
    "mt19937_64/splitmix64-streams/std::normal_distribution";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = normal(rng);
  return m;
}

inline Vector gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

}  // namespace cheblr
