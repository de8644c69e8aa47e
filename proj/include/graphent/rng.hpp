#pragma once

#include <cstdint>

// Counter-based splittable generator (splitmix64 finalizer over a Weyl
// sequence).  Output k of a stream is a pure function of (seed, k), so any
// draw can be produced at random access: parallel trials and per-pair edge
// sampling need no shared state and no fixed visit order.

namespace graphent::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// k-th word of the stream identified by seed.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t k) {
  return mix(seed + (k + 1) * kGolden);
}

// Independent child stream (trial seeds, module-local substreams).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return mix(seed ^ mix(tag + kGolden));
}

// Uniform strictly inside (0,1): the 53-bit mantissa offset by half an ulp,
// so 0.0 and 1.0 are unreachable.
inline double uniform(std::uint64_t seed, std::uint64_t k) {
  return (static_cast<double>(at(seed, k) >> 11) + 0.5) * 0x1p-53;
}

// Sequential convenience wrapper over the counter stream.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return at(seed_, counter_++); }
  double next_double() { return uniform(seed_, counter_++); }

  // Uniform integer in [0, bound) by rejection-free multiply-shift; bias is
  // below 2^-32 for the bounds used here (shuffles, partner picks).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace graphent::rng
