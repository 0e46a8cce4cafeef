#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

/// N(A, ε) = {T : μ(A Δ TA) < ε}.
struct SetNeighborhood {
  DyadicSet set;
  Rational epsilon;
};

/// U_m = {T : μ(T J Δ J) < 2^{-2m} for every block J of resolution m}.
struct BlockNeighborhood {
  int m = 0;
};

using NeighborhoodSpec = std::variant<SetNeighborhood, BlockNeighborhood>;

struct NeighborhoodResult {
  bool member = false;
  /// Index of the block with the largest defect (smallest index on ties); 0 for N(A, ε).
  std::uint64_t worst_block = 0;
  /// The exact defect of the worst block (or μ(A Δ TA)).
  Rational defect;
};

/// Per-block U_m bookkeeping: moved[j] = #{x ∈ J_j : T x ∉ J_j}. The defect of J_j is
/// 2·moved[j]/2^n because |TJ \ J| = |J \ TJ|.
struct BlockDefects {
  int resolution = 0;
  int m = 0;
  std::uint64_t worst_block = 0;
  std::uint64_t worst_moved = 0;

  bool member() const noexcept;
  Rational worst_defect() const { return dyadic_measure(2 * worst_moved, resolution); }
};

namespace detail {
inline void require_block_precision(int resolution, int m) {
  if (m < 0) throw InvalidInput("neighborhood index m must be non-negative");
  if (m > resolution) {
    throw PrecisionError("U_" + std::to_string(m) + " needs resolution >= m, got " +
                         std::to_string(resolution));
  }
}
}  // namespace detail

/// U_m defects of the cell map x ↦ map(x) at `resolution`. `map` must be a bijection.
template <typename Map>
BlockDefects block_defects(int resolution, int m, Map&& map) {
  detail::require_block_precision(resolution, m);
  const int shift = resolution - m;
  std::vector<std::uint64_t> moved(std::size_t{1} << m, 0);
  const std::uint64_t cells = std::uint64_t{1} << resolution;
  for (std::uint64_t x = 0; x < cells; ++x) {
    const std::uint64_t block = x >> shift;
    if ((static_cast<std::uint64_t>(map(static_cast<Cell>(x))) >> shift) != block) ++moved[block];
  }
  BlockDefects out{resolution, m, 0, 0};
  for (std::size_t j = 0; j < moved.size(); ++j) {
    if (moved[j] > out.worst_moved) {
      out.worst_moved = moved[j];
      out.worst_block = j;
    }
  }
  return out;
}

BlockDefects block_defects(const DyadicPermutation& t, int m);

/// Threshold test alone: true iff T ∈ U_m.
bool in_block_neighborhood(const DyadicPermutation& t, int m);

NeighborhoodResult in_neighborhood(const DyadicPermutation& t, const NeighborhoodSpec& spec);

}  // namespace dyadic
