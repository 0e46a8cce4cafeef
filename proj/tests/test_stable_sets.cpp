#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/neighborhood.hpp"
#include "dyadic/perturbation.hpp"
#include "dyadic/stable_sets.hpp"
#include "oracle.hpp"

using namespace dyadic;

namespace {

DyadicSet set_from_mask(std::uint64_t mask, int n) {
  DyadicSet s(n);
  for (Cell x = 0; x < (Cell{1} << n); ++x) {
    if ((mask >> x) & 1U) s.insert(x);
  }
  return s;
}

ActionTruncation trivial_action(int n) {
  return ActionTruncation(GroupTruncation::from_elements({DyadicPermutation::identity(n)}), n);
}

// Small truncations at n = 3 used by the exhaustive laws.
std::vector<ActionTruncation> small_actions() {
  std::vector<ActionTruncation> out;
  out.emplace_back(trivial_action(3));
  out.emplace_back(GroupTruncation::powers(dyadic_shift(1, 3)), 3);
  out.emplace_back(GroupTruncation::powers(dyadic_shift(2, 3)), 3);
  out.emplace_back(GroupTruncation::powers(DyadicPermutation(3, std::vector<Cell>{1, 0, 3, 2, 5, 4, 7, 6})), 3);
  out.emplace_back(transposition_group(3), 3);
  return out;
}

// max over u in filter(m) of ‖f∘u − f‖_∞, by direct evaluation.
Rational oscillation_by_hand(const StepFunction& f, const ActionTruncation& action, int m) {
  Rational worst = 0;
  for (const auto& member : action.filter(m)) {
    const DyadicPermutation u = action.group().element(member.index);
    for (Cell x = 0; x < f.values().size(); ++x) {
      const Rational d = abs(f.values()[u(x)] - f.values()[x]);
      if (d > worst) worst = d;
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("orbit thickening") {
  const DyadicSet a = DyadicSet::from_cells(3, std::vector<Cell>{0});
  CHECK(orbit_thicken(a, {DyadicPermutation::identity(3)}) == a);
  CHECK(orbit_thicken(a, {DyadicPermutation::identity(3), dyadic_shift(1, 3)}).cells() == std::vector<Cell>{0, 1});
  const std::vector<DyadicPermutation> els = {DyadicPermutation::identity(3), dyadic_shift(3, 3), baker(3)};
  for (std::uint64_t x = 0; x < 256; ++x) {
    for (std::uint64_t y = 0; y < 256; y += 5) {
      const auto s = set_from_mask(x, 3), t = set_from_mask(y, 3);
      REQUIRE(orbit_thicken(s | t, els) == (orbit_thicken(s, els) | orbit_thicken(t, els)));
    }
  }
}

TEST_CASE("thickening is equivariant under explicit conjugation") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gm = oracle::random_map(4, rng);
    const DyadicPermutation g(4, std::vector<Cell>(gm.begin(), gm.end()));
    std::vector<DyadicPermutation> u, conj;
    for (int i = 0; i < 3; ++i) {
      const auto om = oracle::random_map(4, rng);
      u.emplace_back(4, std::vector<Cell>(om.begin(), om.end()));
      conj.push_back(compose(g, compose(u.back(), inverse(g))));
    }
    DyadicSet a(4);
    for (Cell x = 0; x < 16; ++x) if (rng.below(3) == 0) a.insert(x);
    REQUIRE(orbit_thicken(push_forward(g, a), conj) == push_forward(g, orbit_thicken(a, u)));
  }
}

TEST_CASE("filters of a power truncation") {
  const ActionTruncation act(GroupTruncation::powers(dyadic_shift(1, 4)), 4);
  CHECK(act.max_m() == 4);
  CHECK(act.filter(1).size() == 3);
  CHECK(act.filter(1).front().index == 0);
  CHECK(act.filter(2).size() == 1);
  CHECK(act.filters_nested());
  CHECK_THROWS_AS(act.filter(0), ConstructionFailure);
  CHECK_THROWS_AS(act.filter(5), ConstructionFailure);
  for (int m = 1; m <= 4; ++m) {
    for (const auto& member : act.filter(m)) {
      const auto e = oracle::images(act.group().element(member.index));
      REQUIRE(oracle::in_um(e, 4, m));
      REQUIRE(member.defect == oracle::worst_defect(e, 4, m));
      // Symmetric under inverse.
      REQUIRE(in_block_neighborhood(inverse(act.group().element(member.index)), m));
    }
  }
}

TEST_CASE("tilde laws, all sets at n = 3") {
  for (const auto& act : small_actions()) {
    for (int depth = 1; depth <= 3; ++depth) {
      for (std::uint64_t x = 0; x < 256; ++x) {
        const auto a = set_from_mask(x, 3);
        const auto ta = tilde(a, act, depth);
        REQUIRE(a.subset_of(ta));
        if (depth > 1) REQUIRE(ta.subset_of(tilde(a, act, depth - 1)));
        REQUIRE(ta.subset_of(tilde(ta, act, depth)));
        for (std::uint64_t y = 0; y < 256; ++y) {
          const auto b = set_from_mask(y, 3);
          for (int m = 1; m <= depth; ++m) {
            REQUIRE(orbit_thicken(a | b, act, m) == (orbit_thicken(a, act, m) | orbit_thicken(b, act, m)));
          }
          REQUIRE(tilde(a & b, act, depth).subset_of(ta & tilde(b, act, depth)));
        }
      }
    }
  }
}

TEST_CASE("intersections of stable sets are stable, n = 3") {
  for (const auto& act : small_actions()) {
    std::vector<DyadicSet> stable;
    for (std::uint64_t x = 0; x < 256; ++x) {
      const auto a = set_from_mask(x, 3);
      if (is_stable(a, act, 2).stable) stable.push_back(a);
    }
    for (const auto& a : stable) {
      for (const auto& b : stable) REQUIRE(is_stable(a & b, act, 2).stable);
    }
  }
}

TEST_CASE("tilde for the trivial group") {
  const auto act = trivial_action(3);
  for (std::uint64_t x = 0; x < 256; ++x) {
    const auto a = set_from_mask(x, 3);
    REQUIRE(tilde(a, act, 3) == a);
  }
  CHECK_THROWS_AS(tilde(DyadicSet::full(3), act, 4), ConstructionFailure);
  CHECK_THROWS_AS(tilde(DyadicSet::full(3), act, 0), InvalidInput);
}

TEST_CASE("stability of a half under the cell shift at n = 4") {
  const ActionTruncation act(GroupTruncation::powers(dyadic_shift(1, 4)), 4);
  const DyadicSet a = DyadicSet::interval(1, 0, Rational(1, 2)).refine(4);
  // U_1 holds the shifts by -1, 0, 1 cells, U_2 only the identity.
  const auto r1 = is_stable(a, act, 1);
  CHECK_FALSE(r1.stable);
  CHECK(r1.defect == Rational(1, 8));
  CHECK(orbit_thicken(a, act, 1).cells() == std::vector<Cell>{0, 1, 2, 3, 4, 5, 6, 7, 8, 15});
  const auto r2 = is_stable(a, act, 2);
  CHECK(r2.stable);
  CHECK(r2.defect == 0);
  CHECK(is_stable(DyadicSet::empty(4), act, 2).stable);
  CHECK(is_stable(DyadicSet::full(4), act, 2).stable);
}

TEST_CASE("hull and interior") {
  const ActionTruncation act(GroupTruncation::powers(dyadic_shift(1, 4)), 4);
  const DyadicSet a = DyadicSet::from_cells(4, std::vector<Cell>{3});
  const DyadicSet hull = stable_hull(a, act, 1);
  CHECK(hull == DyadicSet::full(4));
  CHECK(is_stable(hull, act, 1).stable);
  CHECK(stable_interior(a, act, 1).is_empty());
  CHECK(filter_orbit_count(act, 1) == 1);
  CHECK(filter_orbit_count(act, 2) == 16);
  CHECK(stable_interior(a, act, 2) == a);
}

TEST_CASE("separation for the trivial group and the full space") {
  const auto act = trivial_action(3);
  const DyadicSet a = DyadicSet::from_cells(3, std::vector<Cell>{0, 5});
  const auto sep = separate(a, Rational(1, 8), act, 1);
  CHECK(sep.m == 1);
  CHECK(sep.d == a.complement());
  CHECK(sep.complement_gap == 0);

  const ActionTruncation cyc(GroupTruncation::powers(dyadic_shift(4, 5)), 5);
  const auto full = separate(DyadicSet::full(5), Rational(1, 8), cyc, 1);
  CHECK(full.d.is_empty());
}

TEST_CASE("separation for the order-8 cyclic group at n = 5") {
  // Shift by 4 cells: order 8, the power by ±1 lies in U_1 only.
  const ActionTruncation act(GroupTruncation::powers(dyadic_shift(4, 5)), 5);
  CHECK(act.group().size() == 8);
  int tested = 0;
  for (std::uint64_t choice = 0; choice < 256; ++choice) {
    if (__builtin_popcountll(choice) != 4) continue;
    DyadicSet a(5);
    for (Cell block = 0; block < 8; ++block) {
      if ((choice >> block) & 1U) for (Cell r = 0; r < 4; ++r) a.insert(4 * block + r);
    }
    if (!is_stable(a, act, 2).stable) continue;
    const Rational eps(1, 4);
    const auto sep = separate(a, eps, act, 2);
    const int kk = std::min(sep.k, act.max_m());
    REQUIRE(sep.k == sep.m + 2);
    REQUIRE(sep.d.subset_of(a.complement()));
    REQUIRE((a.complement() - sep.d).measure() < eps);
    REQUIRE(sep.complement_gap == (a.complement() - sep.d).measure());
    REQUIRE((orbit_thicken(a, act, kk) & orbit_thicken(sep.d, act, kk)).is_empty());
    ++tested;
  }
  CHECK(tested > 0);
}

TEST_CASE("separation input checks") {
  const ActionTruncation act(GroupTruncation::powers(dyadic_shift(1, 4)), 2);
  const DyadicSet a = DyadicSet::interval(1, 0, Rational(1, 2)).refine(4);
  CHECK_THROWS_AS(separate(a, Rational(1, 16), act, 1), InvalidInput);
  CHECK_THROWS_AS(separate(a, Rational(0), act, 2), InvalidInput);
  // With nested filters a set stable at depth d has U_d A = A, so scale d always works.
  const auto sep = separate(a, Rational(1, 16), act, 2);
  CHECK(sep.m == 2);
  CHECK(sep.d == a.complement());
}

TEST_CASE("urysohn for the trivial group is the indicator") {
  const auto act = trivial_action(4);
  const DyadicSet a = DyadicSet::from_cells(4, std::vector<Cell>{1, 2, 9});
  const auto r = urysohn(a, Rational(1, 8), act, 1);
  CHECK(r.status == UrysohnResult::Status::kComplete);
  CHECK(r.f == StepFunction::indicator(a));
  CHECK(r.l2_error_squared == 0);
  CHECK(r.within_epsilon);
  CHECK(r.coverage == 1);
}

TEST_CASE("urysohn on the cyclic shift group") {
  for (int k = 3; k <= 6; ++k) {
    const ActionTruncation act(GroupTruncation::powers(dyadic_shift(1, k), 1 << k), k);
    const DyadicSet a = DyadicSet::interval(1, 0, Rational(1, 2)).refine(k);
    const int depth = (k + 1) / 2;
    const Rational eps(1, 4);
    const auto r = urysohn(a, eps, act, depth);
    CAPTURE(k);
    REQUIRE(r.status != UrysohnResult::Status::kDegenerate);
    CHECK(distance(r.f, StepFunction::indicator(a)).l2_squared == r.l2_error_squared);
    CHECK(r.l2_error_squared < eps * eps);
    CHECK(r.within_epsilon);
    for (const auto& row : r.certificate) {
      REQUIRE(row.verified);
      REQUIRE(row.oscillation == oscillation_by_hand(r.f, act, row.m));
      REQUIRE(row.oscillation <= row.bound);
      REQUIRE(row.bound == pow2(1 - row.level));
    }
    // Level sets are disjoint, stable and carry the values of f.
    DyadicSet seen(k);
    for (const auto& [value, set] : r.level_sets) {
      REQUIRE((seen & set).is_empty());
      seen = seen | set;
      for (Cell x : set.cells()) REQUIRE(r.f.values()[x] == value);
    }
    CHECK(seen.measure() == r.coverage);
  }
}

TEST_CASE("urysohn on the cyclic shift group at n = 6 in detail") {
  const ActionTruncation act(GroupTruncation::powers(dyadic_shift(1, 6), 64), 6);
  const DyadicSet a = DyadicSet::interval(1, 0, Rational(1, 2)).refine(6);
  const auto r = urysohn(a, Rational(1, 4), act, 3);
  CHECK(r.status == UrysohnResult::Status::kComplete);
  CHECK(r.l2_error_squared == Rational(1, 128));
  REQUIRE(r.level_sets.size() >= 3);
  CHECK(r.level_sets.front().first == 0);
  CHECK(r.level_sets.front().second.count() == 30);
  CHECK(r.level_sets.back().first == 1);
  CHECK(r.level_sets.back().second == DyadicSet::interval(6, 0, Rational(1, 2)));
  for (const auto& [value, set] : r.level_sets) {
    if (value == Rational(1, 2)) CHECK(set.cells() == std::vector<Cell>{32, 63});
  }
}

TEST_CASE("transposition group is degenerate") {
  const ActionTruncation act(transposition_group(4), 1);
  CHECK(act.group().size() == 1 + 16 * 15 / 2);
  CHECK(is_whirly_at(act, 1));
  CHECK(filter_orbit_count(act, 1) == 1);
  const DyadicSet a = DyadicSet::interval(2, 0, Rational(1, 4)).refine(4);
  CHECK_FALSE(is_stable(a, act, 1).stable);
  CHECK(stable_hull(a, act, 1) == DyadicSet::full(4));
  const auto r = urysohn(a, Rational(1, 2), act, 1);
  CHECK(r.status == UrysohnResult::Status::kDegenerate);
  CHECK(r.f == StepFunction(4, Rational(1, 4)));
  CHECK_FALSE(r.log.empty());
  CHECK_THROWS_AS(transposition_group(7), ResourceError);
}

TEST_CASE("powers of a perturbed baker map are not whirly at finite depth") {
  // The closure of the powers of a whirly-certified S is the setting where only null and
  // conull sets are stable. In the truncation, U_1 holds only Id and S^{n0}, so the
  // orbits stay small and stable sets are plentiful.
  PerturbationParams p;
  p.m = 1;
  const DyadicSet a = random_set(16, 1U << 15, 1), b = random_set(16, 1U << 15, 2);
  const auto run = whirly_perturb(baker(16), a, b, p);
  REQUIRE(run.certified());
  const auto& cert = *run.certificate;
  const ActionTruncation act(GroupTruncation::powers(cert.s), 3);
  CHECK(act.group().size() == 640);
  REQUIRE(act.filter(1).size() == 2);
  CHECK(*act.group().exponent(act.filter(1)[1].index) == cert.n0);
  CHECK(act.filter(2).size() == 1);
  CHECK_FALSE(is_whirly_at(act, 1));
  CHECK(filter_orbit_count(act, 1) == 57216);
  const auto r = urysohn(a, Rational(1, 4), act, 1, 4);
  CHECK(r.status == UrysohnResult::Status::kComplete);
  CHECK(r.l2_error_squared == Rational(4091, 131072));
}

TEST_CASE("h averaging") {
  const StepFunction f(3, std::vector<Rational>{1, 2, 3, 4, 5, 6, 7, Rational(1, 3)});
  CHECK(h_average(f, {DyadicPermutation::identity(3)}) == f);

  std::vector<DyadicPermutation> cyclic;
  for (int k = 0; k < 8; ++k) cyclic.push_back(dyadic_shift(k, 3));
  CHECK(h_average(f, cyclic) == StepFunction(3, f.integral()));

  const DyadicPermutation half_swap(2, std::vector<Cell>{2, 3, 0, 1});
  const StepFunction g(2, std::vector<Rational>{1, 0, 3, Rational(1, 2)});
  const StepFunction avg = h_average(g, {DyadicPermutation::identity(2), half_swap});
  CHECK(avg.values() == std::vector<Rational>{2, Rational(1, 4), 2, Rational(1, 4)});
  CHECK(koopman(half_swap, avg) == avg);
  CHECK(distance(avg, g).l2_squared <= distance(koopman(half_swap, g), g).l2_squared);

  CHECK_THROWS_AS(h_average(f, {DyadicPermutation::identity(3), dyadic_shift(1, 3)}), InvalidInput);
}
