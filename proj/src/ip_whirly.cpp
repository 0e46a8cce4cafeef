#include "dyadic/ip_whirly.hpp"

#include <algorithm>
#include <map>

#include "dyadic/errors.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/whirly_search.hpp"

namespace dyadic {

ProductSpace::ProductSpace(std::vector<int> resolutions, int cell_bits_cap)
    : resolutions_(std::move(resolutions)) {
  if (resolutions_.empty() || resolutions_.size() > 3) {
    throw InvalidInput("product spaces have 1 to 3 factors");
  }
  for (int n : resolutions_) {
    if (n < 0) throw InvalidInput("factor resolution must be non-negative");
    total_ += n;
  }
  if (total_ > cell_bits_cap) {
    throw ResourceError("product space needs 2^" + std::to_string(total_) + " cells, cap is 2^" +
                        std::to_string(cell_bits_cap));
  }
  check_resolution(total_);
}

DyadicSet ProductSpace::box(const std::vector<DyadicSet>& sides) const {
  if (sides.size() != resolutions_.size()) throw InvalidInput("box needs one side per factor");
  std::vector<std::uint64_t> cells{0};
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (sides[i].resolution() > resolutions_[i]) throw InvalidInput("box side finer than its factor");
    const std::vector<Cell> side = sides[i].refine(resolutions_[i]).cells();
    std::vector<std::uint64_t> next;
    next.reserve(cells.size() * side.size());
    for (std::uint64_t prefix : cells) {
      for (Cell c : side) next.push_back((prefix << resolutions_[i]) | c);
    }
    cells = std::move(next);
  }
  DyadicSet out(total_);
  for (std::uint64_t c : cells) out.insert(static_cast<Cell>(c));
  return out;
}

DyadicPermutation ProductSpace::product(const std::vector<DyadicPermutation>& factors) const {
  if (factors.size() != resolutions_.size()) throw InvalidInput("product needs one map per factor");
  std::vector<DyadicPermutation> maps;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].resolution() > resolutions_[i]) throw InvalidInput("factor map finer than its factor");
    maps.push_back(factors[i].refine(resolutions_[i]));
  }
  const std::uint64_t cells = std::uint64_t{1} << total_;
  std::vector<Cell> images(cells);
  for (std::uint64_t x = 0; x < cells; ++x) {
    std::uint64_t y = 0;
    int shift = total_;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      shift -= resolutions_[i];
      const auto coord = static_cast<Cell>((x >> shift) & ((std::uint64_t{1} << resolutions_[i]) - 1));
      y |= static_cast<std::uint64_t>(maps[i](coord)) << shift;
    }
    images[x] = static_cast<Cell>(y);
  }
  return DyadicPermutation(total_, std::move(images));
}

DyadicPermutation ProductSpace::diagonal(const DyadicPermutation& t) const {
  return product(std::vector<DyadicPermutation>(resolutions_.size(), t));
}

bool IPPrefix::verified() const {
  const std::size_t expected = (std::size_t{1} << generators.size()) - 1;
  if (verification.size() != expected) return false;
  return std::all_of(verification.begin(), verification.end(),
                     [](const IPSumCheck& row) { return row.in_neighborhood && row.intersection > 0; });
}

namespace {

class PowerOracle {
 public:
  PowerOracle(const CycleIndex& cycles, const NeighborhoodSpec& spec) : cycles_(cycles), spec_(spec) {
    if (const auto* set = std::get_if<SetNeighborhood>(&spec_)) {
      if (set->epsilon <= 0) throw InvalidInput("N(A, eps) needs eps > 0");
      if (set->set.resolution() > cycles_.resolution()) throw InvalidInput("neighborhood set too fine");
      cells_ = set->set.refine(cycles_.resolution()).cells();
      set_ = set->set.refine(cycles_.resolution());
    } else {
      detail::require_block_precision(cycles_.resolution(), std::get<BlockNeighborhood>(spec_).m);
    }
  }

  bool member(std::int64_t k) {
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    bool in = false;
    if (const auto* block = std::get_if<BlockNeighborhood>(&spec_)) {
      in = power_in_block_neighborhood(cycles_, k, block->m);
    } else {
      std::uint64_t outside = 0;
      for (Cell x : cells_) outside += set_.contains(cycles_.apply_power(x, k)) ? 0 : 1;
      // μ(A Δ T^kA) = 2·|T^kA \ A| / 2^n
      in = dyadic_measure(2 * outside, cycles_.resolution()) < std::get<SetNeighborhood>(spec_).epsilon;
    }
    memo_.emplace(k, in);
    return in;
  }

 private:
  const CycleIndex& cycles_;
  const NeighborhoodSpec& spec_;
  std::vector<Cell> cells_;
  DyadicSet set_;
  std::map<std::int64_t, bool> memo_;
};

std::uint64_t image_hits(const CycleIndex& cycles, const std::vector<Cell>& from, const DyadicSet& to,
                         std::int64_t k, bool stop_at_first) {
  std::uint64_t hits = 0;
  for (Cell x : from) {
    if (to.contains(cycles.apply_power(x, k))) {
      ++hits;
      if (stop_at_first) break;
    }
  }
  return hits;
}

}  // namespace

IPPrefix ip_prefix(const DyadicPermutation& t_in, const NeighborhoodSpec& neighborhood,
                   const DyadicSet& a_in, const DyadicSet& b_in, int k, std::int64_t search_bound) {
  if (k < 1 || k > 20) throw InvalidInput("IP prefix length must lie in [1, 20]");
  if (a_in.is_empty() || b_in.is_empty()) throw InvalidInput("IP prefix needs non-null A and B");
  const int r = std::max({t_in.resolution(), a_in.resolution(), b_in.resolution()});
  const CycleIndex cycles(t_in.refine(r));
  PowerOracle oracle(cycles, neighborhood);

  IPPrefix out;
  out.neighborhood = neighborhood;
  out.a = a_in.refine(r);
  out.b = b_in.refine(r);
  const std::vector<Cell> a_cells = out.a.cells();

  // Current sums with D_s = T^s A ∩ B (D_0 stands for A itself).
  std::vector<std::int64_t> sums{0};
  std::vector<std::vector<Cell>> d_sets{a_cells};
  std::int64_t last = 0;
  for (int step = 0; step < k; ++step) {
    std::optional<std::int64_t> found;
    for (std::int64_t p = last + 1; p <= search_bound && !found; ++p) {
      bool ok = true;
      for (std::size_t i = 0; i < sums.size() && ok; ++i) {
        ok = oracle.member(sums[i] + p) && image_hits(cycles, d_sets[i], out.b, p, true) > 0;
      }
      if (ok) found = p;
    }
    if (!found) {
      out.failure = "search exhausted at step " + std::to_string(step + 1) + " within bound " +
                    std::to_string(search_bound);
      break;
    }
    const std::size_t current = sums.size();
    for (std::size_t i = 0; i < current; ++i) {
      const std::int64_t s = sums[i] + *found;
      std::vector<Cell> d;
      for (Cell x : a_cells) {
        const Cell y = cycles.apply_power(x, s);
        if (out.b.contains(y)) d.push_back(y);
      }
      sums.push_back(s);
      d_sets.push_back(std::move(d));
    }
    out.generators.push_back(*found);
    last = *found;
  }

  const auto g = static_cast<std::uint32_t>(out.generators.size());
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << g); ++mask) {
    IPSumCheck row;
    row.subset_mask = mask;
    for (std::uint32_t i = 0; i < g; ++i) {
      if (mask & (std::uint32_t{1} << i)) row.sum += out.generators[i];
    }
    row.in_neighborhood = oracle.member(row.sum);
    row.intersection = dyadic_measure(image_hits(cycles, a_cells, out.b, row.sum, false), r);
    out.verification.push_back(row);
  }
  out.complete = static_cast<int>(g) == k && out.verified();
  if (static_cast<int>(g) == k && !out.complete) out.failure = "final verification failed";
  return out;
}

ProductProbeReport whirly_all_orders_probe(const DyadicPermutation& t, int order,
                                           const std::vector<std::pair<DyadicSet, DyadicSet>>& pairs,
                                           int m, std::int64_t max_power, bool allow_zero) {
  if (order < 1 || order > 3) throw InvalidInput("product order must lie in [1, 3]");
  if (max_power < 0) throw InvalidInput("power bound must be non-negative");
  const int r = t.resolution();
  const ProductSpace space(std::vector<int>(static_cast<std::size_t>(order), r));
  detail::require_block_precision(r, m);
  const CycleIndex cycles(t);
  const int total = space.total_resolution();
  const Cell mask = (Cell{1} << r) - 1;
  const auto apply = [&](Cell x, std::int64_t k) {
    Cell y = 0;
    for (int i = order - 1; i >= 0; --i) {
      const int shift = i * r;
      y |= cycles.apply_power((x >> shift) & mask, k) << shift;
    }
    return y;
  };

  std::map<std::int64_t, bool> member;
  const auto in_um = [&](std::int64_t k) {
    auto it = member.find(k);
    if (it == member.end()) it = member.emplace(k, power_in_block_neighborhood(cycles, k, m)).first;
    return it->second;
  };

  ProductProbeReport report;
  report.order = order;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [a0, b0] = pairs[p];
    if (a0.resolution() > total || b0.resolution() > total) {
      throw InvalidInput("product pair is finer than the product space");
    }
    const std::vector<Cell> a_cells = a0.refine(total).cells();
    const DyadicSet b = b0.refine(total);
    if (a_cells.empty() || b.is_empty()) throw InvalidInput("product probe needs non-null sets");
    ProductWitnessRow row;
    row.pair = p;
    for (std::uint64_t i = 0; i < 2 * static_cast<std::uint64_t>(max_power) + 1; ++i) {
      const std::int64_t k = signed_order_exponent(i);
      if (k == 0 && !allow_zero) continue;
      const bool meets = std::any_of(a_cells.begin(), a_cells.end(),
                                     [&](Cell x) { return b.contains(apply(x, k)); });
      if (!meets || !in_um(k)) continue;
      row.witness = k;
      const BlockDefects d = block_defects(r, m, [&](Cell x) { return cycles.apply_power(x, k); });
      row.defect = d.worst_defect();
      std::uint64_t hits = 0;
      for (Cell x : a_cells) hits += b.contains(apply(x, k)) ? 1 : 0;
      row.intersection = dyadic_measure(hits, total);
      break;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::optional<std::int64_t> skew_rigidity(const DyadicPermutation& t, const Rational& alpha, int m,
                                          const Rational& epsilon, std::int64_t max_power) {
  if (epsilon <= 0) throw InvalidInput("skew rigidity needs eps > 0");
  if (max_power < 1) throw InvalidInput("skew rigidity needs max_power >= 1");
  detail::require_block_precision(t.resolution(), m);
  const CycleIndex cycles(t);
  for (std::int64_t n = 1; n <= max_power; ++n) {
    if (distance_to_integer(alpha * n) < epsilon && power_in_block_neighborhood(cycles, n, m)) return n;
  }
  return std::nullopt;
}

std::vector<Rational> convergents(const Rational& alpha, std::size_t limit) {
  if (alpha < 0) throw InvalidInput("convergents need a non-negative rational");
  std::vector<Rational> out;
  Integer h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  Integer num = numerator(alpha);
  Integer den = denominator(alpha);
  while (den != 0 && out.size() < limit) {
    const Integer a = num / den;
    const Integer h = a * h_prev + h_prev2;
    const Integer k = a * k_prev + k_prev2;
    out.emplace_back(h, k);
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const Integer rem = num - a * den;
    num = den;
    den = rem;
  }
  return out;
}

}  // namespace dyadic
