#include "dyadic/tower.hpp"

#include <algorithm>

#include "dyadic/errors.hpp"

namespace dyadic {

DyadicSet Tower::floor(std::int64_t level) const {
  if (level < 0 || level >= height) throw InvalidInput("tower floor out of range");
  const CycleIndex cycles(transform);
  DyadicSet out(base.resolution());
  for (Cell c : base_cells) out.insert(cycles.apply_power(c, level));
  return out;
}

bool Tower::verify() const {
  DyadicSet covered(base.resolution());
  DyadicSet level = base;
  for (std::int64_t i = 0; i < height; ++i) {
    if (!covered.disjoint_from(level)) return false;
    covered |= level;
    level = push_forward(transform, level);
  }
  return covered.complement() == remainder &&
         base.measure() * height + remainder.measure() == 1;
}

Rational minimal_remainder(const CycleIndex& cycles, std::int64_t height) {
  if (height < 1) throw InvalidInput("tower height must be >= 1");
  const auto h = static_cast<std::uint64_t>(height);
  std::uint64_t rest = 0;
  for (std::size_t c = 0; c < cycles.cycle_count(); ++c) rest += cycles.cycle_length(c) % h;
  return dyadic_measure(rest, cycles.resolution());
}

Tower rohlin_tower(const DyadicPermutation& t, std::int64_t height, const Rational& epsilon) {
  if (height < 1) throw InvalidInput("tower height must be >= 1");
  if (epsilon <= 0) throw InvalidInput("tower remainder bound must be positive");
  const CycleIndex cycles(t);
  const Rational achieved = minimal_remainder(cycles, height);
  if (achieved >= epsilon) {
    throw ConstructionFailure("tower-infeasible",
                              "tower of height " + std::to_string(height) +
                                  " leaves remainder " + to_string(achieved) + " >= " +
                                  to_string(epsilon));
  }
  const auto h = static_cast<std::uint64_t>(height);
  Tower tower{t, DyadicSet(t.resolution()), height, DyadicSet(t.resolution()), {}};
  for (std::size_t c = 0; c < cycles.cycle_count(); ++c) {
    const auto cyc = cycles.cycle(c);
    const std::uint64_t columns = cyc.size() / h;
    for (std::uint64_t k = 0; k < columns; ++k) {
      tower.base.insert(cyc[k * h]);
      tower.base_cells.push_back(cyc[k * h]);
    }
    for (std::uint64_t i = columns * h; i < cyc.size(); ++i) tower.remainder.insert(cyc[i]);
  }
  std::sort(tower.base_cells.begin(), tower.base_cells.end());
  return tower;
}

}  // namespace dyadic
