#include "dyadic/whirly_search.hpp"

#include <algorithm>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/neighborhood.hpp"
#include "dyadic/parallel.hpp"

namespace dyadic {

bool power_in_block_neighborhood(const CycleIndex& cycles, std::int64_t k, int m) {
  const int n = cycles.resolution();
  detail::require_block_precision(n, m);
  const int e = n - 2 * m - 1;
  const std::uint64_t limit = e < 0 ? 1 : (std::uint64_t{1} << e);  // moved must stay below
  const int shift = n - m;
  std::vector<std::uint64_t> moved(std::size_t{1} << m, 0);
  const std::uint64_t cells = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < cells; ++x) {
    const std::uint64_t block = x >> shift;
    if ((static_cast<std::uint64_t>(cycles.apply_power(static_cast<Cell>(x), k)) >> shift) != block) {
      if (++moved[block] >= limit) return false;
    }
  }
  return true;
}

namespace {

Witness describe(const CycleIndex& cycles, std::int64_t n, int m, const std::vector<Cell>& a_cells,
                 const DyadicSet& b) {
  const BlockDefects d = block_defects(cycles.resolution(), m,
                                       [&](Cell x) { return cycles.apply_power(x, n); });
  std::uint64_t hits = 0;
  for (Cell x : a_cells) hits += b.contains(cycles.apply_power(x, n)) ? 1 : 0;
  return {n, d.worst_defect(), dyadic_measure(hits, cycles.resolution())};
}

}  // namespace

std::optional<Witness> whirly_witness(const DyadicPermutation& t, const DyadicSet& a,
                                      const DyadicSet& b, int m, std::int64_t max_power,
                                      bool allow_zero, unsigned threads) {
  if (a.is_empty() || b.is_empty()) throw InvalidInput("whirly witness needs non-null A and B");
  if (max_power < 0) throw InvalidInput("power bound must be non-negative");
  const int n = std::max({t.resolution(), a.resolution(), b.resolution()});
  const CycleIndex cycles(t.refine(n));
  detail::require_block_precision(n, m);
  const std::vector<Cell> a_cells = a.refine(n).cells();
  const DyadicSet bn = b.refine(n);
  const std::uint64_t count = 2 * static_cast<std::uint64_t>(max_power) + 1;
  auto pred = [&](std::uint64_t i) {
    const std::int64_t k = signed_order_exponent(i);
    if (k == 0 && !allow_zero) return false;
    const bool meets = std::any_of(a_cells.begin(), a_cells.end(),
                                   [&](Cell x) { return bn.contains(cycles.apply_power(x, k)); });
    return meets && power_in_block_neighborhood(cycles, k, m);
  };
  const auto hit = first_match(count, threads, pred);
  if (!hit) return std::nullopt;
  return describe(cycles, signed_order_exponent(*hit), m, a_cells, bn);
}

std::optional<Witness> rigidity_witness(const DyadicPermutation& t, int m, std::int64_t max_power,
                                        unsigned threads) {
  if (max_power < 1) throw InvalidInput("rigidity search needs max_power >= 1");
  const CycleIndex cycles(t);
  detail::require_block_precision(t.resolution(), m);
  const auto hit = first_match(static_cast<std::uint64_t>(max_power), threads, [&](std::uint64_t i) {
    return power_in_block_neighborhood(cycles, static_cast<std::int64_t>(i + 1), m);
  });
  if (!hit) return std::nullopt;
  const auto k = static_cast<std::int64_t>(*hit + 1);
  const BlockDefects d = block_defects(t.resolution(), m, [&](Cell x) { return cycles.apply_power(x, k); });
  return Witness{k, d.worst_defect(), Rational(0)};
}

}  // namespace dyadic
