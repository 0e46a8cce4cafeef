#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/neighborhood.hpp"
#include "dyadic/perturbation.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/tower.hpp"
#include "oracle.hpp"

using namespace dyadic;

namespace {

struct Baker16 {
  DyadicPermutation t0 = baker(16);
  DyadicSet a = random_set(16, 1U << 15, 1);
  DyadicSet b = random_set(16, 1U << 15, 2);
  PerturbationParams params;
  PerturbationResult result;

  Baker16() {
    params.m = 1;
    params.epsilon = Rational(1, 32);
    result = whirly_perturb(t0, a, b, params);
  }
};

const Baker16& baker16() {
  static const Baker16 run;
  return run;
}

}  // namespace

TEST_CASE("parameter defaults") {
  PerturbationParams p;
  p.m = 2;
  CHECK(p.gamma_value() == Rational(1, 16));
  CHECK(p.delta_value() == Rational(1, 160));
  p.m = 1;
  CHECK(p.gamma_value() == Rational(1, 4));
  CHECK(p.delta_value() == Rational(1, 40));
  p.gamma = Rational(1, 8);
  CHECK(p.delta_value() == Rational(1, 80));
  CHECK(p.min_return_time() == 320);
  p.epsilon = Rational(3, 100);
  CHECK(p.min_return_time() == 334);
}

TEST_CASE("parameter validation") {
  PerturbationParams p;
  p.m = 2;
  p.gamma = Rational(1, 8);
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p.gamma.reset();
  p.epsilon = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p.epsilon = Rational(1, 32);
  p.eta = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p.eta = Rational(1, 100);
  p.horizon = 100;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p.horizon = 1 << 12;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("status names") {
  CHECK(to_string(PerturbationStatus::kCertified) == "certified");
  CHECK(to_string(PerturbationStatus::kNoMixing) == "no-mixing");
  CHECK(to_string(PerturbationStatus::kFrequencyFailure) == "frequency-failure");
  CHECK(to_string(PerturbationStatus::kTowerInfeasible) == "tower-infeasible");
  CHECK(to_string(PerturbationStatus::kCertificateFailure) == "certificate-failure");
}

TEST_CASE("the identity is rejected by the mixing precheck") {
  const DyadicSet a = DyadicSet::interval(2, 0, Rational(1, 4));
  const auto r = whirly_perturb(DyadicPermutation::identity(12), a, a, PerturbationParams{});
  CHECK(r.status == PerturbationStatus::kNoMixing);
  CHECK_FALSE(r.certificate);
}

TEST_CASE("null sets are rejected") {
  CHECK_THROWS_AS(whirly_perturb(baker(12), DyadicSet::empty(12), DyadicSet::full(12), PerturbationParams{}),
                  InvalidInput);
}

TEST_CASE("full space") {
  PerturbationParams p;
  p.m = 1;
  // At n = 14 no height 320·2^k leaves less than ε/2 of the single 2^14-cycle.
  const DyadicSet small = DyadicSet::full(14);
  CHECK(whirly_perturb(baker(14), small, small, p).status == PerturbationStatus::kTowerInfeasible);

  const DyadicSet x = DyadicSet::full(16);
  const auto r = whirly_perturb(baker(16), x, x, p);
  REQUIRE(r.certified());
  const auto& c = *r.certificate;
  CHECK(c.bound_lhs == 1);
  CHECK(c.bound_rhs == p.delta_value());
  CHECK(c.n0 == p.min_return_time());
  CHECK(verify_certificate(c).ok);
}

TEST_CASE("baker(16) with random half-measure sets is certified") {
  const auto& run = baker16();
  REQUIRE(run.result.certified());
  const auto& c = *run.result.certificate;
  CHECK(c.inequalities_hold());
  CHECK(c.closeness < Rational(1, 32));
  CHECK(c.um_defect < Rational(1, 4));
  CHECK(c.bound_lhs > c.bound_rhs);
  CHECK(c.bound_rhs == Rational(1, 40) * Rational(1, 4));
  CHECK(c.height == c.n0 * c.blocks);
  const auto report = verify_certificate(c);
  CHECK(report.ok);
  CHECK(report.violations.empty());
}

TEST_CASE("baker(16) certificate rechecked with the cell-set oracle") {
  const auto& run = baker16();
  REQUIRE(run.result.certified());
  const auto& c = *run.result.certificate;
  const int n = 16;
  const auto s = oracle::images(c.s);
  const auto t0 = oracle::images(c.t0);
  REQUIRE(oracle::compose(s, oracle::inverse(s)) == oracle::identity(n));

  std::size_t differ = 0;
  for (std::size_t x = 0; x < s.size(); ++x) differ += s[x] != t0[x];
  CHECK(dyadic_measure(differ, n) == c.closeness);

  const auto sn0 = oracle::power(s, c.n0);
  CHECK(oracle::worst_defect(sn0, n, c.m) == c.um_defect);
  const auto a = oracle::cells(c.a), b = oracle::cells(c.b);
  const Rational lhs = oracle::measure(oracle::intersect(oracle::push(sn0, a), b), n);
  CHECK(lhs == c.bound_lhs);
  CHECK(lhs > c.delta * oracle::measure(a, n) * oracle::measure(b, n));
}

TEST_CASE("S changes T0 only at ceilings and on the remainder") {
  const auto& run = baker16();
  REQUIRE(run.result.certified());
  const auto& c = *run.result.certificate;
  const Tower tower = rohlin_tower(c.t0, c.height, c.epsilon / 2);
  const auto& d = run.result.diagnostics;
  REQUIRE(tower.base_cells.size() == d.base_cells);
  REQUIRE(tower.remainder_measure() == d.remainder);
  CHECK(d.remainder < c.epsilon / 2);

  // Ceiling sets: the γ-columns change only at floor N-1, the rest at floors n0-1, 2n0-1, ...
  DyadicSet allowed = tower.remainder;
  const CycleIndex idx(c.t0);
  for (std::size_t k = 0; k < tower.base_cells.size(); ++k) {
    const Cell base = tower.base_cells[k];
    if (k < d.gamma_cells) {
      allowed.insert(idx.apply_power(base, c.height - 1));
    } else {
      for (std::int64_t block = 1; block <= c.blocks; ++block) allowed.insert(idx.apply_power(base, block * c.n0 - 1));
    }
  }
  for (Cell x = 0; x < (1U << 16); ++x) {
    if (c.s(x) != c.t0(x)) REQUIRE(allowed.contains(x));
  }
  const Rational bound = c.gamma / c.height + Rational(c.blocks, c.height) + c.epsilon / 2;
  CHECK(c.closeness <= bound);
}

TEST_CASE("S^n0 is the identity on the columns outside the gamma part") {
  const auto& run = baker16();
  REQUIRE(run.result.certified());
  const auto& c = *run.result.certificate;
  const Tower tower = rohlin_tower(c.t0, c.height, c.epsilon / 2);
  const CycleIndex t0_idx(c.t0);
  const CycleIndex s_idx(c.s);
  std::uint64_t checked = 0;
  for (std::size_t k = run.result.diagnostics.gamma_cells; k < tower.base_cells.size(); ++k) {
    for (std::int64_t level = 0; level < c.height; ++level) {
      const Cell x = t0_idx.apply_power(tower.base_cells[k], level);
      REQUIRE(s_idx.apply_power(x, c.n0) == x);
      ++checked;
    }
  }
  CHECK(checked == (tower.base_cells.size() - run.result.diagnostics.gamma_cells) * static_cast<std::uint64_t>(c.height));
  // On the γ-part the period is the full height.
  const Cell g = tower.base_cells.front();
  CHECK(s_idx.apply_power(g, c.height) == g);
  CHECK(s_idx.apply_power(g, c.n0) != g);
  // S is the identity on the remainder.
  for (Cell x : tower.remainder.cells()) REQUIRE(c.s(x) == x);
}

TEST_CASE("tampered certificates are rejected") {
  const auto& run = baker16();
  REQUIRE(run.result.certified());
  const WhirlyCertificate& good = *run.result.certificate;

  WhirlyCertificate wrong_value = good;
  wrong_value.bound_lhs += pow2(-16);
  auto r = verify_certificate(wrong_value);
  CHECK_FALSE(r.ok);
  CHECK(std::find(r.violations.begin(), r.violations.end(), "bound_lhs mismatch") != r.violations.end());

  // Moving S far from T0 breaks closeness.
  WhirlyCertificate far = good;
  far.s = power(good.t0, 2);
  r = verify_certificate(far);
  CHECK_FALSE(r.ok);
  CHECK(std::find(r.violations.begin(), r.violations.end(), "closeness") != r.violations.end());

  // Replacing B by a set S^{n0}A avoids makes the bound fail.
  WhirlyCertificate miss = good;
  miss.b = push_forward(power(good.s, good.n0), good.a).complement();
  r = verify_certificate(miss);
  CHECK_FALSE(r.ok);
  CHECK(std::find(r.violations.begin(), r.violations.end(), "intersection_bound") != r.violations.end());

  // A serialized certificate with a non-bijective S.
  Json j = to_json(good);
  j["s"]["images"][0] = j["s"]["images"][1];
  const auto jr = verify_certificate_json(j);
  CHECK_FALSE(jr.ok);
  CHECK(jr.violations.front() == "bijectivity");

  CHECK(verify_certificate_json(to_json(good)).ok);
  CHECK(certificate_from_json(to_json(good)).s == good.s);
}

TEST_CASE("V_km membership") {
  const DyadicSet q1 = DyadicSet::interval(2, 0, Rational(1, 4));
  const DyadicSet q3 = DyadicSet::interval(2, Rational(1, 2), Rational(3, 4));
  CHECK(*v_km_member(baker(10), q1, q1, 1, 16) == 0);
  // The snapped third: any power in U_1 moves mass below 1/4, so no nonzero witness.
  const auto rot = rotation_convergent(1, 3, 10);
  CHECK_FALSE(v_km_member(rot, q1, q3, 1, 3, std::nullopt, false));
  for (long long k = -3; k <= 3; ++k) {
    if (k == 0) continue;
    const auto tk = oracle::power(oracle::images(rot), k);
    const bool in_u1 = oracle::in_um(tk, 10, 1);
    const bool hits = !oracle::intersect(oracle::push(tk, oracle::cells(q1.refine(10))), oracle::cells(q3.refine(10))).empty();
    REQUIRE_FALSE((in_u1 && hits));
  }
  // The perturbed S has its own witness no later than n0.
  const auto& run = baker16();
  REQUIRE(run.result.certified());
  const auto& c = *run.result.certificate;
  const auto w = v_km_member(c.s, c.a, c.b, c.m, c.n0, c.delta, false);
  REQUIRE(w);
  CHECK(std::llabs(*w) <= c.n0);
  CHECK(*w == c.n0);
}

TEST_CASE("scan pairs") {
  const auto p = scan_pairs(10, 5, PairKind::kDisjointIntervals, 3);
  REQUIRE(p.size() == 5);
  for (const auto& [a, b] : p) {
    CHECK((a & b).is_empty());
    CHECK(a.measure() == Rational(1, 4));
  }
  for (const auto& [a, b] : scan_pairs(10, 5, PairKind::kRandomSets, 3)) CHECK(a.measure() == Rational(1, 2));
  CHECK(scan_pairs(10, 5, PairKind::kIntervals, 3) == scan_pairs(10, 5, PairKind::kIntervals, 3));
}

TEST_CASE("generic scan baselines") {
  ScanConfig config;
  config.samplers = {"rand:14", "rot:1/3:14"};
  config.pair_count = 20;
  config.m_max = 2;
  config.search_bound = 1 << 10;
  config.seed = 1;
  const auto rows = generic_scan(config);
  REQUIRE(rows.size() == 4);
  // Frozen on first run. A random 2^14-cycle has no power in U_1 within 1024 steps,
  // while the snapped third returns near the identity after three steps.
  CHECK(rows[0].sampler == "rand:14");
  CHECK(rows[0].passes == 0);
  CHECK(rows[1].passes == 0);
  CHECK(rows[2].passes == 16);
  CHECK(rows[3].passes == 16);
  CHECK(rows[2].pass_rate == Rational(4, 5));

  config.threads = 3;
  const auto again = generic_scan(config);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].passes == rows[i].passes);

  ScanConfig id;
  id.samplers = {"id:12"};
  id.pairs = PairKind::kDisjointIntervals;
  id.m_max = 2;
  for (const auto& row : generic_scan(id)) CHECK(row.passes == 0);
}
