#pragma once

#include <cstdint>
#include <string_view>

namespace segrobust {

/// FNV-1a 64-bit hash, used to derive per-item RNG streams from string ids.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// SplitMix64 stream. Fully specified, so outputs are identical across
/// platforms and standard-library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Unbiased draw in [0, n), n >= 1, by rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  /// Inclusive range draw.
  std::int64_t in(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform double in [0, 1).
  double unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Stream seed for one dataset item: a SplitMix64 scramble of
/// master_seed XOR fnv1a64(item_id). Parallel workers derive identical
/// streams no matter how items are scheduled.
inline std::uint64_t item_seed(std::uint64_t master_seed,
                               std::string_view item_id) {
  return SplitMix64(master_seed ^ fnv1a64(item_id)).next();
}

}  // namespace segrobust
