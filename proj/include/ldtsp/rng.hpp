#pragma once

#include <cstdint>

namespace ldtsp {

/// splitmix64 stream generator.
///
/// This is the project-wide PRNG for anything that must be reproducible
/// across implementations and languages: the full algorithm is
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Draws below a small bound n use next() % n (the modulo bias at n <= 10
/// is ~5e-19 and irrelevant here). Uniform doubles use the top 53 bits.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in {0, ..., n-1}.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next() % n);
  }

private:
  std::uint64_t state_;
};

} // namespace ldtsp
