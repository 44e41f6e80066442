#pragma once

#include <cstdint>

namespace poslab {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// State after absorbing (key, stream); lets hot loops reuse the first two
// rounds when only the counter changes.
struct PrfPrefix {
  std::uint64_t state = 0;

  constexpr std::uint64_t finish(std::uint64_t counter) const {
    return mix64(state ^ ((counter + 1) * kGoldenGamma));
  }
};

constexpr PrfPrefix prf64_prefix(std::uint64_t key, std::uint64_t stream) {
  const std::uint64_t h = mix64(key + kGoldenGamma);
  return PrfPrefix{mix64(h ^ ((stream + 1) * kGoldenGamma))};
}

/// Counter-based pseudorandom function standing in for the lottery hash.
/// Pure and bit-reproducible; outputs are uniform over [0, 2^64).
constexpr std::uint64_t prf64(std::uint64_t key, std::uint64_t stream,
                              std::uint64_t counter) {
  return prf64_prefix(key, stream).finish(counter);
}

/// Top 53 bits of a prf64 output mapped onto [0, 1).
constexpr double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counters used under prf64(master_seed, slot, k).
inline constexpr std::uint64_t kSlotSaltCounter = 0;
inline constexpr std::uint64_t kOuroborosDrawCounter = 2;
inline constexpr std::uint64_t kProportionalDrawCounter = 3;
// prf64(miner.seed, j, 1) for split accounts; prf64(master_seed, id, 5) for
// default miner seeds.
inline constexpr std::uint64_t kSplitAccountCounter = 1;
inline constexpr std::uint64_t kMinerSeedCounter = 5;

constexpr std::uint64_t slot_salt(std::uint64_t master_seed,
                                  std::uint64_t slot) {
  return prf64(master_seed, slot, kSlotSaltCounter);
}

}  // namespace poslab
