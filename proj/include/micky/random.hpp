#pragma once

// Deterministic random streams. One master seed fans out into independent
// mt19937_64 streams keyed by (index, purpose) through std::seed_seq, whose
// mixing is fixed by the standard, so streams are reproducible everywhere.

#include <cstdint>
#include <random>

namespace micky {

enum class StreamTag : std::uint32_t {
  Agent = 1,      // initial condition, then block draws
  StepScale = 2,  // subgradient-magnitude sampling for the automatic stepsize
  Topology = 3,
  Noise = 4,
  Workload = 5,
  Replicate = 6,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

// 53-bit uniform double in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, StreamTag tag) {
  return make_stream(seed, index, tag)();
}

}  // namespace micky
