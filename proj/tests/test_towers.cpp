#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/tower.hpp"
#include "oracle.hpp"

using namespace dyadic;

namespace {

// Exact recheck with std::set: floors pairwise disjoint, remainder is the complement.
void check_tower_by_oracle(const Tower& tw) {
  const int n = tw.transform.resolution();
  const auto t = oracle::images(tw.transform);
  oracle::CellSet floor = oracle::cells(tw.base);
  oracle::CellSet covered;
  for (std::int64_t level = 0; level < tw.height; ++level) {
    REQUIRE(oracle::intersect(floor, covered).empty());
    REQUIRE(oracle::cells(tw.floor(level)) == floor);
    covered.insert(floor.begin(), floor.end());
    floor = oracle::push(t, floor);
  }
  oracle::CellSet all = oracle::cells(DyadicSet::full(n));
  REQUIRE(oracle::cells(tw.remainder) == oracle::symdiff(all, covered));
  REQUIRE(tw.base.measure() * tw.height + tw.remainder_measure() == 1);
}

}  // namespace

TEST_CASE("full cycle with height dividing the period") {
  for (std::int64_t h : {1, 2, 4, 8, 16}) {
    const Tower tw = rohlin_tower(dyadic_shift(1, 4), h, Rational(1, 1000));
    CHECK(tw.remainder.is_empty());
    CHECK(tw.base.measure() == Rational(1, h));
    CHECK(tw.verify());
    check_tower_by_oracle(tw);
  }
  const Tower tw = rohlin_tower(dyadic_shift(1, 4), 4, Rational(1, 1000));
  CHECK(tw.base_cells == std::vector<Cell>{0, 4, 8, 12});
}

TEST_CASE("eight-cycle with height three") {
  const Tower tw = rohlin_tower(dyadic_shift(1, 3), 3, Rational(1, 2));
  CHECK(tw.remainder.count() == 2);
  CHECK(tw.remainder_measure() == Rational(1, 4));
  CHECK(tw.base_cells == std::vector<Cell>{0, 3});
  CHECK(tw.remainder.cells() == std::vector<Cell>{6, 7});
  check_tower_by_oracle(tw);
  CHECK_THROWS_AS(rohlin_tower(dyadic_shift(1, 3), 3, Rational(1, 4)), ConstructionFailure);
}

TEST_CASE("identity admits no tower of height two") {
  for (const Rational eps : {Rational(1, 2), Rational(99, 100), Rational(1)}) {
    CHECK_THROWS_AS(rohlin_tower(DyadicPermutation::identity(4), 2, eps), ConstructionFailure);
  }
  try {
    rohlin_tower(DyadicPermutation::identity(4), 2, Rational(1, 2));
  } catch (const ConstructionFailure& e) {
    CHECK(e.kind() == "tower-infeasible");
    CHECK(std::string(e.what()).find("1/1") != std::string::npos);
  }
  CHECK(minimal_remainder(CycleIndex(DyadicPermutation::identity(4)), 2) == 1);
  CHECK(rohlin_tower(DyadicPermutation::identity(4), 1, Rational(1, 16)).remainder.is_empty());
}

TEST_CASE("invalid heights") {
  CHECK_THROWS_AS(rohlin_tower(dyadic_shift(1, 3), 0, Rational(1, 2)), InvalidInput);
  CHECK_THROWS_AS(rohlin_tower(dyadic_shift(1, 3), 2, Rational(0)), InvalidInput);
}

TEST_CASE("towers over random permutations satisfy the invariants") {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const auto om = oracle::random_map(n, rng);
    const DyadicPermutation t(n, std::vector<Cell>(om.begin(), om.end()));
    const std::int64_t h = 1 + static_cast<std::int64_t>(rng.below(6));
    const CycleIndex idx(t);
    const Rational best = minimal_remainder(idx, h);
    // Direct cycle arithmetic.
    std::uint64_t rem = 0;
    for (std::size_t c = 0; c < idx.cycle_count(); ++c) rem += idx.cycle_length(c) % static_cast<std::uint64_t>(h);
    REQUIRE(best == dyadic_measure(rem, n));
    if (best < 1) {
      const Tower tw = rohlin_tower(t, h, best + pow2(-n));
      REQUIRE(tw.remainder_measure() == best);
      REQUIRE(tw.verify());
      check_tower_by_oracle(tw);
    } else {
      REQUIRE_THROWS_AS(rohlin_tower(t, h, Rational(1)), ConstructionFailure);
    }
  }
}

TEST_CASE("minimal remainder along divisibility chains") {
  // L mod N is not monotone in N: an 8-cycle leaves 2 cells for N = 3 and none for N = 4.
  const CycleIndex eight(dyadic_shift(1, 3));
  CHECK(minimal_remainder(eight, 3) > minimal_remainder(eight, 4));
  // (L mod 2N) mod N = L mod N, so doubling N never shrinks the remainder.
  oracle::Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const auto om = oracle::random_map(n, rng);
    const CycleIndex idx(DyadicPermutation(n, std::vector<Cell>(om.begin(), om.end())));
    for (std::int64_t h = 1; h <= 32; h *= 2) REQUIRE(minimal_remainder(idx, h) <= minimal_remainder(idx, 2 * h));
  }
}

TEST_CASE("single random cycle leaves at most N - 1 cells") {
  for (int n = 4; n <= 14; n += 2) {
    const auto t = random_cycle(n, static_cast<std::uint64_t>(n));
    const CycleIndex idx(t);
    for (std::int64_t h = 1; h <= (std::int64_t{1} << (n / 2)); ++h) {
      REQUIRE(minimal_remainder(idx, h) <= Rational(h - 1, std::int64_t{1} << n));
    }
  }
}

TEST_CASE("tower json") {
  const Tower tw = rohlin_tower(dyadic_shift(1, 3), 3, Rational(1, 2));
  const Json j = to_json(tw, "shift:1:3");
  CHECK(j["transform"] == "shift:1:3");
  CHECK(j["height"] == 3);
  CHECK(j["remainder_measure"] == "1/4");
}
