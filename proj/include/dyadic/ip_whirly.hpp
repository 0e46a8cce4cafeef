#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/config.hpp"
#include "dyadic/dyadic_set.hpp"
#include "dyadic/neighborhood.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

/// X^{n_1} × ... × X^{n_d} with cells indexed by concatenated bits, factor 0 most
/// significant. Sets and permutations live at resolution Σ n_i.
class ProductSpace {
 public:
  explicit ProductSpace(std::vector<int> resolutions, int cell_bits_cap = kDefaultProductCellBits);

  const std::vector<int>& resolutions() const noexcept { return resolutions_; }
  int dimension() const noexcept { return static_cast<int>(resolutions_.size()); }
  int total_resolution() const noexcept { return total_; }

  DyadicSet box(const std::vector<DyadicSet>& sides) const;
  DyadicPermutation product(const std::vector<DyadicPermutation>& factors) const;
  /// T × ... × T.
  DyadicPermutation diagonal(const DyadicPermutation& t) const;

 private:
  std::vector<int> resolutions_;
  int total_ = 0;
};

struct IPSumCheck {
  std::uint32_t subset_mask = 0;
  std::int64_t sum = 0;
  bool in_neighborhood = false;
  Rational intersection;
};

struct IPPrefix {
  std::vector<std::int64_t> generators;
  NeighborhoodSpec neighborhood;
  DyadicSet a;
  DyadicSet b;
  /// One row per non-empty subset of the generators.
  std::vector<IPSumCheck> verification;
  bool complete = false;
  std::string failure;

  bool verified() const;
};

/// Inductive IP construction: p_{j+1} is the smallest integer in (p_j, search_bound] with
/// T^{s + p} ∈ U and μ(T^p D_s ∩ B) > 0 for every current sum s (including s = 0,
/// where D_0 = A ∩ B is replaced by A). All 2^k − 1 sums are re-verified before
/// returning. On exhaustion a partial prefix is returned with complete = false.
IPPrefix ip_prefix(const DyadicPermutation& t, const NeighborhoodSpec& neighborhood,
                   const DyadicSet& a, const DyadicSet& b, int k, std::int64_t search_bound);

struct ProductWitnessRow {
  std::size_t pair = 0;
  std::optional<std::int64_t> witness;
  Rational defect;
  Rational intersection;
};

struct ProductProbeReport {
  int order = 1;
  std::vector<ProductWitnessRow> rows;
};

/// whirly_witness for T^{×d} on X^d: smallest |n| ≤ max_power with T^n ∈ U_m on the
/// factor and μ((T^n)^{×d} A ∩ B) > 0, for each product-space pair.
ProductProbeReport whirly_all_orders_probe(const DyadicPermutation& t, int order,
                                           const std::vector<std::pair<DyadicSet, DyadicSet>>& pairs,
                                           int m, std::int64_t max_power, bool allow_zero = true);

/// Smallest n in [1, max_power] with T^n ∈ U_m and ‖nα‖ < ε (distance to nearest integer).
std::optional<std::int64_t> skew_rigidity(const DyadicPermutation& t, const Rational& alpha, int m,
                                          const Rational& epsilon, std::int64_t max_power);

/// Continued-fraction convergents p_i/q_i of a positive rational (or its first `limit`).
std::vector<Rational> convergents(const Rational& alpha, std::size_t limit = 64);

}  // namespace dyadic
