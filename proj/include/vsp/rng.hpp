#pragma once

#include <cstdint>
#include <random>

namespace vsp {

/// SplitMix64 finalizer; the standard 64-bit mixer used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-trial seed: independent of execution order and worker
/// count, so parallel sweeps reproduce serial ones bit for bit.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t grid_index,
                                std::uint64_t trial) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ splitmix64(grid_index + 0x51ed2701ab7f3a6dULL));
  h = splitmix64(h ^ splitmix64(trial + 0xc2b2ae3d27d4eb4fULL));
  return h;
}

}  // namespace vsp
