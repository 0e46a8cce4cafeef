#include "dyadic/neighborhood.hpp"

namespace dyadic {

bool BlockDefects::member() const noexcept {
  // 2·moved/2^n < 2^{-2m}  <=>  moved < 2^{n-2m-1}
  const int e = resolution - 2 * m - 1;
  if (e < 0) return worst_moved == 0;
  return worst_moved < (std::uint64_t{1} << e);
}

BlockDefects block_defects(const DyadicPermutation& t, int m) {
  return block_defects(t.resolution(), m, [&t](Cell x) { return t(x); });
}

bool in_block_neighborhood(const DyadicPermutation& t, int m) { return block_defects(t, m).member(); }

NeighborhoodResult in_neighborhood(const DyadicPermutation& t, const NeighborhoodSpec& spec) {
  if (const auto* block = std::get_if<BlockNeighborhood>(&spec)) {
    const BlockDefects d = block_defects(t, block->m);
    return {d.member(), d.worst_block, d.worst_defect()};
  }
  const auto& set_spec = std::get<SetNeighborhood>(spec);
  if (set_spec.epsilon <= 0) throw InvalidInput("N(A, eps) needs eps > 0");
  const Rational defect = symmetric_distance(set_spec.set, push_forward(t, set_spec.set));
  return {defect < set_spec.epsilon, 0, defect};
}

}  // namespace dyadic
