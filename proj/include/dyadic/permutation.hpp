#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/step_function.hpp"

namespace dyadic {

/// A measure-preserving automorphism of the dyadic measure algebra: a bijection
/// of the 2^n cells. Bijectivity is checked on construction.
class DyadicPermutation {
 public:
  DyadicPermutation() : DyadicPermutation(identity(0)) {}
  DyadicPermutation(int resolution, std::vector<Cell> images);

  static DyadicPermutation identity(int resolution);

  int resolution() const noexcept { return resolution_; }
  std::uint64_t cell_count() const noexcept { return images_.size(); }
  Cell operator()(Cell cell) const noexcept { return images_[cell]; }
  std::span<const Cell> images() const noexcept { return images_; }

  bool is_identity() const noexcept;
  /// Block action on a finer grid: cell x·2^d + r maps to T(x)·2^d + r.
  DyadicPermutation refine(int resolution) const;

  bool operator==(const DyadicPermutation& other) const;

 private:
  struct Unchecked {};
  DyadicPermutation(Unchecked, int resolution, std::vector<Cell> images) noexcept
      : resolution_(resolution), images_(std::move(images)) {}

  friend DyadicPermutation compose(const DyadicPermutation&, const DyadicPermutation&);
  friend DyadicPermutation inverse(const DyadicPermutation&);
  friend class CycleIndex;

  int resolution_;
  std::vector<Cell> images_;
};

/// (S ∘ T)(x) = S(T(x)); operands are refined to a common resolution.
DyadicPermutation compose(const DyadicPermutation& s, const DyadicPermutation& t);
DyadicPermutation inverse(const DyadicPermutation& t);
/// T^k through the cycle decomposition, O(2^n) for any k.
DyadicPermutation power(const DyadicPermutation& t, std::int64_t k);

/// Cycle decomposition of a permutation. Cycles are listed by their smallest
/// cell; each cycle starts at that cell. Evaluates T^k(x) in O(1).
class CycleIndex {
 public:
  explicit CycleIndex(const DyadicPermutation& t);

  int resolution() const noexcept { return resolution_; }
  std::size_t cycle_count() const noexcept { return starts_.size() - 1; }
  std::span<const Cell> cycle(std::size_t i) const {
    return std::span<const Cell>(order_).subspan(starts_[i], starts_[i + 1] - starts_[i]);
  }
  std::uint64_t cycle_length(std::size_t i) const { return starts_[i + 1] - starts_[i]; }
  std::size_t cycle_of(Cell x) const noexcept { return cycle_id_[x]; }
  std::uint64_t position_of(Cell x) const noexcept { return position_[x]; }

  Cell apply_power(Cell x, std::int64_t k) const noexcept;
  DyadicPermutation power(std::int64_t k) const;
  /// lcm of cycle lengths, or nullopt when it exceeds `limit`.
  std::optional<std::uint64_t> order(std::uint64_t limit) const;

 private:
  int resolution_;
  std::vector<Cell> order_;
  std::vector<std::size_t> starts_;
  std::vector<std::uint32_t> cycle_id_;
  std::vector<std::uint32_t> position_;
};

/// T(A) = {T(x) : x ∈ A}.
DyadicSet push_forward(const DyadicPermutation& t, const DyadicSet& a);

/// μ{x : S(x) ≠ T(x)}.
Rational uniform_dist(const DyadicPermutation& s, const DyadicPermutation& t);

/// U_T f = f ∘ T⁻¹.
StepFunction koopman(const DyadicPermutation& t, const StepFunction& f);

}  // namespace dyadic
