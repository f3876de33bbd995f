#pragma once

#include <cstdint>
#include <random>

namespace ota {

// splitmix64 finalizer; decorrelates nearby inputs.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based derivation of per-trial seeds. Depends only on (master_seed, index),
// so trial streams are identical no matter how trials are scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ (index * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace ota
