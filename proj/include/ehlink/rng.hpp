#pragma once

#include <cstdint>
#include <random>

namespace ehlink {

using Rng = std::mt19937_64;

/// Independent substreams of one trial. Environment streams (channel, harvest)
/// never depend on protocol decisions, so schemes run with the same seed see
/// the same fading and energy arrivals.
enum class Stream : std::uint64_t { Channel = 1, Harvest = 2, Decode = 3, Policy = 4 };

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  // 53 random mantissa bits, [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ehlink
