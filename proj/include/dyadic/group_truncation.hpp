#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/config.hpp"
#include "dyadic/dyadic_set.hpp"
#include "dyadic/permutation.hpp"

namespace dyadic {

/// A finite list of group elements standing in for a closed subgroup of Aut(X):
/// either the powers {T^k : |k| ≤ bound} of one generator (evaluated through its
/// cycle index, never materialized) or an explicit list closed under inverses.
class GroupTruncation {
 public:
  /// Distinct powers of `t` with |k| ≤ bound. Exponents are enumerated
  /// 0, 1, -1, 2, -2, ... and an exponent is dropped when an earlier one gives the
  /// same element (k ≡ k' mod the order of t).
  static GroupTruncation powers(const DyadicPermutation& t,
                                std::int64_t bound = kDefaultPowerBound);
  /// Explicit elements; the identity and missing inverses are added, duplicates dropped.
  static GroupTruncation from_elements(std::vector<DyadicPermutation> elements,
                                       std::vector<std::string> labels = {});
  /// All products of at most `max_length` generators or their inverses.
  static GroupTruncation words(const std::vector<DyadicPermutation>& generators, int max_length);

  int resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  /// The exponent k when this truncation is a power list.
  std::optional<std::int64_t> exponent(std::size_t i) const;
  bool is_power_list() const noexcept { return cycles_ != nullptr; }

  Cell apply(std::size_t i, Cell x) const;
  DyadicPermutation element(std::size_t i) const;
  /// Image of a set under element i.
  DyadicSet push(std::size_t i, const DyadicSet& a) const;

  template <typename Fn>
  auto with_map(std::size_t i, Fn&& fn) const {
    if (cycles_) {
      const std::int64_t k = exponents_[i];
      const CycleIndex& idx = *cycles_;
      return fn([&idx, k](Cell x) { return idx.apply_power(x, k); });
    }
    const DyadicPermutation& p = explicit_[i];
    return fn([&p](Cell x) { return p(x); });
  }

 private:
  GroupTruncation() = default;

  int resolution_ = 0;
  std::shared_ptr<const CycleIndex> cycles_;
  std::vector<std::int64_t> exponents_;
  std::vector<DyadicPermutation> explicit_;
  std::vector<std::string> labels_;
};

}  // namespace dyadic
