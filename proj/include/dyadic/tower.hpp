#pragma once

#include <cstdint>
#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

/// A Rohlin tower: floors base, T base, ..., T^{N-1} base are pairwise disjoint and
/// `remainder` is the complement of their union.
struct Tower {
  DyadicPermutation transform;
  DyadicSet base;
  std::int64_t height = 0;
  DyadicSet remainder;
  /// Base cells in increasing index order.
  std::vector<Cell> base_cells;

  Rational remainder_measure() const { return remainder.measure(); }
  DyadicSet floor(std::int64_t level) const;
  /// Exact recheck of the tower invariants.
  bool verify() const;
};

/// Marks every N-th cell along each cycle, starting at the cycle's smallest cell.
/// A cycle of length L contributes floor(L/N) base cells and L mod N remainder cells.
/// Throws ConstructionFailure("tower-infeasible") when μ(remainder) ≥ ε; the message
/// carries the achieved remainder.
Tower rohlin_tower(const DyadicPermutation& t, std::int64_t height, const Rational& epsilon);

/// Σ (L_i mod N) / 2^n, the remainder the cycle-marking construction attains.
Rational minimal_remainder(const CycleIndex& cycles, std::int64_t height);

}  // namespace dyadic
