#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

/// x ↦ x + k mod 2^n: rotation by k·2^{-n}.
DyadicPermutation dyadic_shift(std::int64_t k, int resolution);

/// Rotation by p/q snapped to the grid: shift by round(2^n·p/q) cells (halves round up).
DyadicPermutation rotation_convergent(std::int64_t p, std::int64_t q, int resolution);
std::int64_t snapped_shift(const Rational& alpha, int resolution);

/// Doubling-map coupling on cells: x ↦ rotl(x, 1) + c mod 2^n with c the odd
/// integer nearest 2^n(√5−1)/2, after which all cycles are joined into one
/// 2^n-cycle by swapping images of consecutive cycle minima.
DyadicPermutation baker(int resolution);

/// A uniformly random single 2^n-cycle (Sattolo), deterministic in `seed`.
DyadicPermutation random_cycle(int resolution, std::uint64_t seed);

/// Parses "id:n", "shift:k:n", "rot:p/q:n", "baker:n", "rand:n" or "rand:n:seed=s".
DyadicPermutation parse_generator(std::string_view spec);

/// Portable 64-bit generator (splitmix64) for everything that samples in exact modules.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// Random subset with exactly `count` cells, deterministic in `seed`.
DyadicSet random_set(int resolution, std::uint64_t count, std::uint64_t seed);

}  // namespace dyadic
