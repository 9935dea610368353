#pragma once

#include <cstdint>
#include <random>

namespace relbc {

/// splitmix64 finalizer; used for seed mixing and substream derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic, splittable random stream.
///
/// Substreams are derived from the creating seed and a tag, not from the
/// generator state, so the order in which substreams are split off never
/// changes their output. The draw path avoids std::uniform_int_distribution
/// (unspecified across standard libraries); results are reproducible for a
/// fixed seed on any conforming platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in [0, bound). bound >= 1. Mask-and-reject, unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = ~0ull >> __builtin_clzll((bound - 1) | 1);
    for (;;) {
      std::uint64_t v = gen_() & mask;
      if (v < bound) return v;
    }
  }

  bool next_bit() { return (gen_() & 1) != 0; }

  RngStream substream(std::uint64_t tag) const { return RngStream(mix64(seed_ ^ mix64(tag))); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

/// Fixed substream tags so that every station draws from an independent,
/// reproducible stream regardless of scheduling order.
namespace rng_tag {
inline constexpr std::uint64_t kAliceKey = 0x0A11CE00;
inline constexpr std::uint64_t kAliceAltKeys = 0x0A11CE01;
inline constexpr std::uint64_t kCommitBit = 0x0A11CE02;
inline constexpr std::uint64_t kB1Challenge = 0x0B0B0001;
inline constexpr std::uint64_t kB2Challenge = 0x0B0B0002;
inline constexpr std::uint64_t kTrialBase = 0x7121A150;
}  // namespace rng_tag

}  // namespace relbc
