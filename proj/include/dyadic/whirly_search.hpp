#pragma once

#include <cstdint>
#include <optional>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

struct Witness {
  std::int64_t n = 0;
  /// Worst U_m defect of T^n.
  Rational defect;
  /// μ(T^n A ∩ B); zero for rigidity witnesses.
  Rational intersection;
};

/// Smallest |n| ≤ max_power (positive before negative) with T^n ∈ U_m and
/// μ(T^n A ∩ B) > 0. n = 0 is admitted only when allow_zero.
std::optional<Witness> whirly_witness(const DyadicPermutation& t, const DyadicSet& a,
                                      const DyadicSet& b, int m, std::int64_t max_power,
                                      bool allow_zero = true, unsigned threads = 1);

/// Smallest n in [1, max_power] with T^n ∈ U_m.
std::optional<Witness> rigidity_witness(const DyadicPermutation& t, int m, std::int64_t max_power,
                                        unsigned threads = 1);

/// Early-exit U_m test of x ↦ T^k x, evaluated through the cycle index.
bool power_in_block_neighborhood(const CycleIndex& cycles, std::int64_t k, int m);

}  // namespace dyadic
