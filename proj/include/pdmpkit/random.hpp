#pragma once

#include <cstdint>
#include <random>

namespace pdmpkit {

using Rng = std::mt19937_64;

/// Independent stream for replica `index` of a run seeded with `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Unit-rate exponential draw.
inline double exponential1(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace pdmpkit
