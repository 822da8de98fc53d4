#pragma once

#include <cstdint>
#include <random>

namespace excursion {

using Rng = std::mt19937_64;

// Independent, reproducible stream for replicate `stream` of a run seeded
// with `seed`. Streams depend only on the pair, never on scheduling.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist;
  return dist(rng);
}

// Uniform on the open interval (0, 1).
inline double open_uniform(Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(rng);
  while (u <= 0.0) u = dist(rng);
  return u;
}

}  // namespace excursion
