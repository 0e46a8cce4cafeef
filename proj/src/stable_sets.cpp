#include "dyadic/stable_sets.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "dyadic/errors.hpp"
#include "dyadic/neighborhood.hpp"

namespace dyadic {
namespace {

// U_m test of a cell map with early exit; fills `defect` for members.
template <typename Map>
bool block_member(int resolution, int m, Map&& map, Rational& defect) {
  const int e = resolution - 2 * m - 1;
  const std::uint64_t limit = e < 0 ? 1 : (std::uint64_t{1} << e);
  const int shift = resolution - m;
  std::vector<std::uint64_t> moved(std::size_t{1} << m, 0);
  std::uint64_t worst = 0;
  const std::uint64_t cells = std::uint64_t{1} << resolution;
  for (std::uint64_t x = 0; x < cells; ++x) {
    const std::uint64_t block = x >> shift;
    if ((static_cast<std::uint64_t>(map(static_cast<Cell>(x))) >> shift) != block) {
      if (++moved[block] >= limit) return false;
      worst = std::max(worst, moved[block]);
    }
  }
  defect = dyadic_measure(2 * worst, resolution);
  return true;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;  // the smaller cell stays the root
  }

 private:
  std::vector<std::size_t> parent_;
};

// Orbit representative (smallest cell) of every cell under the group generated by filter(depth).
std::vector<std::size_t> orbit_roots(const ActionTruncation& action, int depth) {
  const std::size_t cells = std::size_t{1} << action.resolution();
  DisjointSets sets(cells);
  for (const auto& member : action.filter(depth)) {
    action.group().with_map(member.index, [&](auto map) {
      for (std::size_t x = 0; x < cells; ++x) sets.unite(x, map(static_cast<Cell>(x)));
      return 0;
    });
  }
  std::vector<std::size_t> roots(cells);
  for (std::size_t x = 0; x < cells; ++x) roots[x] = sets.find(x);
  return roots;
}

DyadicSet at_resolution(const DyadicSet& a, int resolution) {
  if (a.resolution() > resolution) {
    throw InvalidInput("set resolution " + std::to_string(a.resolution()) +
                       " is finer than the action resolution " + std::to_string(resolution));
  }
  return a.refine(resolution);
}

void require_depth(const ActionTruncation& action, int depth) {
  if (depth < 1) throw InvalidInput("depth must be >= 1");
  if (depth > action.max_m()) {
    throw ConstructionFailure("insufficient-truncation",
                              "depth " + std::to_string(depth) + " exceeds the truncation's U_m filters (max m = " +
                                  std::to_string(action.max_m()) + ")");
  }
}

}  // namespace

ActionTruncation::ActionTruncation(GroupTruncation group, std::optional<int> max_m)
    : group_(std::move(group)) {
  const int r = group_.resolution();
  const int top = max_m.value_or(r);
  if (top < 1) throw InvalidInput("action truncation needs max_m >= 1");
  detail::require_block_precision(r, top);
  std::vector<std::size_t> candidates(group_.size());
  std::iota(candidates.begin(), candidates.end(), 0);
  // Membership in U_{m+1} implies membership in U_m, so only survivors are retested.
  for (int m = 1; m <= top; ++m) {
    std::vector<Member> members;
    std::vector<std::size_t> survivors;
    for (std::size_t i : candidates) {
      Rational defect;
      const bool in = group_.with_map(i, [&](auto map) { return block_member(r, m, map, defect); });
      if (in) {
        members.push_back({i, defect});
        survivors.push_back(i);
      }
    }
    filters_.push_back(std::move(members));
    candidates = std::move(survivors);
  }
}

const std::vector<ActionTruncation::Member>& ActionTruncation::filter(int m) const {
  if (m < 1 || m > max_m()) {
    throw ConstructionFailure("insufficient-truncation",
                              "no U_" + std::to_string(m) + " filter in this truncation");
  }
  return filters_[static_cast<std::size_t>(m - 1)];
}

std::vector<std::size_t> ActionTruncation::filter_indices(int m) const {
  std::vector<std::size_t> out;
  for (const auto& member : filter(m)) out.push_back(member.index);
  return out;
}

bool ActionTruncation::filters_nested() const {
  for (int m = 1; m < max_m(); ++m) {
    const auto outer = filter_indices(m);
    for (std::size_t i : filter_indices(m + 1)) {
      if (!std::binary_search(outer.begin(), outer.end(), i)) return false;
    }
  }
  return true;
}

DyadicSet orbit_thicken(const DyadicSet& a, const std::vector<DyadicPermutation>& elements) {
  int n = a.resolution();
  for (const auto& e : elements) n = std::max(n, e.resolution());
  const DyadicSet src = a.refine(n);
  DyadicSet out(n);
  for (const auto& e : elements) out |= push_forward(e.refine(n), src);
  return out;
}

DyadicSet orbit_thicken(const DyadicSet& a, const ActionTruncation& action, int m) {
  const DyadicSet src = at_resolution(a, action.resolution());
  DyadicSet out(action.resolution());
  for (const auto& member : action.filter(m)) {
    action.group().with_map(member.index, [&](auto map) {
      src.for_each_cell([&](Cell c) { out.insert(map(c)); });
      return 0;
    });
  }
  return out;
}

DyadicSet tilde(const DyadicSet& a, const ActionTruncation& action, int depth) {
  require_depth(action, depth);
  DyadicSet out = orbit_thicken(a, action, 1);
  for (int m = 2; m <= depth; ++m) out &= orbit_thicken(a, action, m);
  return out;
}

StabilityReport is_stable(const DyadicSet& a, const ActionTruncation& action, int depth) {
  const DyadicSet src = at_resolution(a, action.resolution());
  const Rational defect = (tilde(src, action, depth) - src).measure();
  return {defect == 0, defect};
}

DyadicSet stable_hull(const DyadicSet& a, const ActionTruncation& action, int depth) {
  DyadicSet current = at_resolution(a, action.resolution());
  while (true) {
    DyadicSet next = tilde(current, action, depth) | current;
    if (next == current) return current;
    current = std::move(next);
  }
}

DyadicSet stable_interior(const DyadicSet& a, const ActionTruncation& action, int depth) {
  require_depth(action, depth);
  const DyadicSet src = at_resolution(a, action.resolution());
  const auto roots = orbit_roots(action, depth);
  std::vector<char> inside(roots.size(), 1);
  for (std::size_t x = 0; x < roots.size(); ++x) {
    if (!src.contains(static_cast<Cell>(x))) inside[roots[x]] = 0;
  }
  DyadicSet out(action.resolution());
  for (std::size_t x = 0; x < roots.size(); ++x) {
    if (inside[roots[x]]) out.insert(static_cast<Cell>(x));
  }
  return out;
}

std::size_t filter_orbit_count(const ActionTruncation& action, int depth) {
  require_depth(action, depth);
  const auto roots = orbit_roots(action, depth);
  std::size_t count = 0;
  for (std::size_t x = 0; x < roots.size(); ++x) count += roots[x] == x ? 1 : 0;
  return count;
}

bool is_whirly_at(const ActionTruncation& action, int m) {
  const auto& members = action.filter(m);
  const std::uint64_t cells = std::uint64_t{1} << action.resolution();
  for (std::uint64_t x = 0; x < cells; ++x) {
    DyadicSet reach(action.resolution());
    for (const auto& member : members) reach.insert(action.group().apply(member.index, static_cast<Cell>(x)));
    if (reach.count() != cells) return false;
  }
  return true;
}

Separation separate(const DyadicSet& a_in, const Rational& epsilon, const ActionTruncation& action,
                    int depth) {
  require_depth(action, depth);
  if (epsilon <= 0) throw InvalidInput("separation needs eps > 0");
  const DyadicSet a = at_resolution(a_in, action.resolution());
  if (!is_stable(a, action, depth).stable) throw InvalidInput("separation needs a stable set");
  const DyadicSet a_comp = a.complement();
  for (int m = 1; m <= depth; ++m) {
    const DyadicSet um_a = orbit_thicken(a, action, m);
    if (!((um_a - a).measure() < epsilon)) continue;
    const DyadicSet d = stable_hull(um_a.complement(), action, depth);
    const int k = m + 2;
    // U_k sits inside U_{max_m} when k exceeds the truncation, so testing the coarser
    // filter is the stronger check.
    const int k_test = std::min(k, action.max_m());
    const Rational gap = (a_comp - d).measure();
    if (d.subset_of(a_comp) && gap < epsilon &&
        orbit_thicken(a, action, k_test).disjoint_from(orbit_thicken(d, action, k_test))) {
      return {d, k, m, gap};
    }
  }
  throw ConstructionFailure("separation-failure",
                            "no m <= " + std::to_string(depth) + " separates the set within eps = " +
                                to_string(epsilon));
}

std::string to_string(UrysohnResult::Status status) {
  switch (status) {
    case UrysohnResult::Status::kComplete: return "complete";
    case UrysohnResult::Status::kPartial: return "partial";
    case UrysohnResult::Status::kDegenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

Rational oscillation(const StepFunction& f, const ActionTruncation& action, int m) {
  Rational worst = 0;
  const std::size_t cells = f.values().size();
  for (const auto& member : action.filter(m)) {
    action.group().with_map(member.index, [&](auto map) {
      for (std::size_t x = 0; x < cells; ++x) {
        Rational diff = f[map(static_cast<Cell>(x))] - f[static_cast<Cell>(x)];
        if (diff < 0) diff = -diff;
        if (diff > worst) worst = diff;
      }
      return 0;
    });
  }
  return worst;
}

struct Region {
  Rational lo;
  Rational hi;
  DyadicSet cells;
};

}  // namespace

UrysohnResult urysohn(const DyadicSet& a_in, const Rational& epsilon, const ActionTruncation& action,
                      int depth, int max_levels) {
  require_depth(action, depth);
  if (epsilon <= 0) throw InvalidInput("Urysohn construction needs eps > 0");
  if (max_levels < 1) throw InvalidInput("max_levels must be >= 1");
  const int r = action.resolution();
  const DyadicSet a = at_resolution(a_in, r);
  const StepFunction indicator = StepFunction::indicator(a);
  const Rational eps_sq = epsilon * epsilon;
  UrysohnResult out;

  const auto finish = [&](UrysohnResult& res) {
    res.l2_error_squared = (res.f - indicator).l2_squared();
    res.within_epsilon = res.l2_error_squared < eps_sq;
    return res;
  };

  if (filter_orbit_count(action, depth) == 1) {
    out.status = UrysohnResult::Status::kDegenerate;
    out.f = StepFunction(r, a.measure());
    out.coverage = 1;
    out.level_sets.emplace_back(a.measure(), DyadicSet::full(r));
    out.scales.push_back(depth);
    out.certificate.push_back({1, depth, oscillation(out.f, action, depth), Rational(1), true});
    out.log.push_back("U_" + std::to_string(depth) +
                      " generates a transitive group: only the null set and the whole space are "
                      "stable, so f is the constant mu(A) = " + to_string(a.measure()));
    return finish(out);
  }

  // Level 0: D_1 inside A, D_0 inside the complement, separated at scale k.
  std::map<Rational, DyadicSet> level;
  level[Rational(1)] = stable_interior(a, action, depth);
  const Separation sep = separate(level[Rational(1)], eps_sq, action, depth);
  level[Rational(0)] = sep.d & stable_interior(a.complement(), action, depth);
  out.log.push_back("separation at m = " + std::to_string(sep.m) + ", k = " + std::to_string(sep.k));
  int scale = std::min(sep.k, action.max_m());
  out.scales.push_back(scale);

  std::vector<Region> regions;
  {
    const DyadicSet gap = (level[Rational(0)] | level[Rational(1)]).complement();
    if (!gap.is_empty()) regions.push_back({Rational(0), Rational(1), gap});
  }
  std::vector<Region> terminal;
  bool exhausted = false;

  for (int lvl = 1; lvl <= max_levels && !regions.empty(); ++lvl) {
    DyadicSet thick(r);
    for (const auto& [value, d] : level) thick |= orbit_thicken(d, action, scale);
    const DyadicSet e = thick.complement();
    std::vector<Region> next;
    for (Region& region : regions) {
      const Rational mid = (region.lo + region.hi) / 2;
      const DyadicSet part = e & region.cells;
      if (part.is_empty()) {
        out.log.push_back("level " + std::to_string(lvl) + ": U_" + std::to_string(scale) +
                          "D_r covers the region between " + to_string(region.lo) + " and " +
                          to_string(region.hi) + "; construction terminates there");
        terminal.push_back(std::move(region));
        continue;
      }
      const DyadicSet dc = stable_hull(part, action, depth);
      level[mid] = dc;
      const DyadicSet lo_thick = orbit_thicken(level[region.lo], action, scale);
      // Orbits of the rest go to the lower half when they touch U D_lo, else the upper half.
      const DyadicSet rest = region.cells - dc;
      const DyadicSet lower = stable_hull(rest & lo_thick, action, depth) & rest;
      const DyadicSet upper = rest - lower;
      if (!lower.is_empty()) next.push_back({region.lo, mid, lower});
      if (!upper.is_empty()) next.push_back({mid, region.hi, upper});
    }
    regions = std::move(next);
    if (regions.empty()) break;

    // m_{lvl} > m_{lvl-1} + 2: mass bound and pairwise disjointness of the thickenings.
    const Rational mass_bound = pow2(-(lvl + 1));
    std::optional<int> chosen;
    for (int m = scale + 3; m <= action.max_m() && !chosen; ++m) {
      Rational mass = 0;
      DyadicSet seen(r);
      bool disjoint = true;
      for (const auto& [value, d] : level) {
        const DyadicSet ud = orbit_thicken(d, action, m);
        mass += (ud - d).measure();
        if (!seen.disjoint_from(ud)) disjoint = false;
        seen |= ud;
      }
      if (mass < mass_bound && disjoint) chosen = m;
    }
    if (!chosen) {
      out.log.push_back("level " + std::to_string(lvl) + ": no scale m > " + std::to_string(scale + 2) +
                        " within the truncation meets the mass and disjointness conditions");
      exhausted = true;
      break;
    }
    scale = *chosen;
    out.scales.push_back(scale);
  }

  std::vector<Rational> values(std::size_t{1} << r, Rational(0));
  DyadicSet covered(r);
  for (const auto& [value, d] : level) {
    d.for_each_cell([&](Cell c) { values[c] = value; });
    covered |= d;
    out.level_sets.emplace_back(value, d);
  }
  for (const auto* list : {&terminal, &regions}) {
    for (const Region& region : *list) {
      const Rational mid = (region.lo + region.hi) / 2;
      region.cells.for_each_cell([&](Cell c) { values[c] = mid; });
    }
  }
  out.f = StepFunction(r, std::move(values));
  out.coverage = covered.measure();
  out.status = (regions.empty() && !exhausted) || covered.count() == covered.cell_count()
                   ? UrysohnResult::Status::kComplete
                   : UrysohnResult::Status::kPartial;
  if (!regions.empty() && !exhausted) {
    out.log.push_back("level budget of " + std::to_string(max_levels) + " exhausted");
  }
  for (std::size_t i = 0; i < out.scales.size(); ++i) {
    const int lvl = static_cast<int>(i) + 1;
    const Rational osc = oscillation(out.f, action, out.scales[i]);
    const Rational bound = pow2(-(lvl - 1));
    out.certificate.push_back({lvl, out.scales[i], osc, bound, osc <= bound});
  }
  return finish(out);
}

StepFunction h_average(const StepFunction& f, const std::vector<DyadicPermutation>& group) {
  if (group.empty()) throw InvalidInput("averaging needs a non-empty group");
  int n = f.resolution();
  for (const auto& g : group) n = std::max(n, g.resolution());
  std::vector<DyadicPermutation> h;
  std::map<std::vector<Cell>, std::size_t> index;
  for (const auto& g : group) {
    h.push_back(g.refine(n));
    index.emplace(std::vector<Cell>(h.back().images().begin(), h.back().images().end()), h.size() - 1);
  }
  const auto contains = [&](const DyadicPermutation& p) {
    return index.count(std::vector<Cell>(p.images().begin(), p.images().end())) > 0;
  };
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!contains(inverse(h[i]))) {
      throw InvalidInput("group not closed: inverse of element " + std::to_string(i) + " is missing");
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!contains(compose(h[i], h[j]))) {
        throw InvalidInput("group not closed: product of elements " + std::to_string(i) + " and " +
                           std::to_string(j) + " is missing");
      }
    }
  }
  const StepFunction base = f.refine(n);
  std::vector<Rational> sum(base.values().size(), Rational(0));
  for (const auto& g : h) {
    const StepFunction moved = koopman(g, base);
    for (std::size_t x = 0; x < sum.size(); ++x) sum[x] += moved.values()[x];
  }
  const Rational count(static_cast<long long>(h.size()));
  for (auto& v : sum) v /= count;
  return StepFunction(n, std::move(sum));
}

GroupTruncation transposition_group(int resolution) {
  if (resolution < 0 || resolution > 6) {
    throw ResourceError("transposition group is limited to resolution <= 6");
  }
  const Cell cells = Cell{1} << resolution;
  std::vector<DyadicPermutation> elements;
  std::vector<std::string> labels;
  for (Cell x = 0; x < cells; ++x) {
    for (Cell y = x + 1; y < cells; ++y) {
      std::vector<Cell> images(cells);
      std::iota(images.begin(), images.end(), Cell{0});
      std::swap(images[x], images[y]);
      elements.emplace_back(resolution, std::move(images));
      labels.push_back("(" + std::to_string(x) + " " + std::to_string(y) + ")");
    }
  }
  if (elements.empty()) elements.push_back(DyadicPermutation::identity(resolution));
  if (labels.size() != elements.size()) labels.assign(elements.size(), "id");
  return GroupTruncation::from_elements(std::move(elements), std::move(labels));
}

}  // namespace dyadic
