#pragma once

// Deterministic random streams.
//
// Every stochastic component draws from a SplitMix64 generator. A run has one
// integer seed; each component derives its own stream from that seed and a
// stream name:
//
//   stream_seed = splitmix64_mix(seed ^ fnv1a64(name))
//
// Uniform reals take the top 53 bits of the next output and scale by 2^-53.
// Uniform integers in [0, n) use rejection on the 64-bit output so the result
// is exactly uniform. None of this depends on <random> distributions, whose
// output is implementation-defined.

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace semcse {

[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

[[nodiscard]] constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  /// Stream for a named component of a seeded run.
  [[nodiscard]] static constexpr Rng stream(std::uint64_t seed, std::string_view name) noexcept {
    return Rng(splitmix64_mix(seed ^ fnv1a64(name)));
  }

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
  }

  /// Uniform in [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11U) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) {
      throw std::invalid_argument("Rng::below: empty range");
    }
    // 2^64 mod n; outputs below it are rejected so the rest is a multiple of n.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t v = next();
      if (v >= threshold) {
        return v % n;
      }
    }
  }

  [[nodiscard]] constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace semcse
