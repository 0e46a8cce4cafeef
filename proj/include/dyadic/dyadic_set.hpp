#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/rational.hpp"

namespace dyadic {

using Cell = std::uint32_t;

/// A subset of the 2^n dyadic cells of [0,1) at resolution n, stored as a bitmap.
///
/// Binary operations on sets of different resolutions refine the coarser
/// operand first, so a set and its refinement are interchangeable.
class DyadicSet {
 public:
  DyadicSet() : DyadicSet(0) {}
  explicit DyadicSet(int resolution);

  static DyadicSet empty(int resolution) { return DyadicSet(resolution); }
  static DyadicSet full(int resolution);
  static DyadicSet from_cells(int resolution, std::span<const Cell> cells);
  /// Cells [first, last) at the given resolution.
  static DyadicSet cell_range(int resolution, std::uint64_t first, std::uint64_t last);
  /// The union of half-open intervals [lo, hi) with endpoints that must be
  /// multiples of 2^-resolution.
  static DyadicSet interval(int resolution, const Rational& lo, const Rational& hi);
  /// J^{(m)}_j refined to `resolution`.
  static DyadicSet block(int resolution, int m, std::uint64_t j);

  int resolution() const noexcept { return resolution_; }
  std::uint64_t cell_count() const noexcept { return std::uint64_t{1} << resolution_; }

  bool contains(Cell cell) const noexcept { return (words_[cell >> 6] >> (cell & 63)) & 1U; }
  void insert(Cell cell) noexcept { words_[cell >> 6] |= std::uint64_t{1} << (cell & 63); }
  void erase(Cell cell) noexcept { words_[cell >> 6] &= ~(std::uint64_t{1} << (cell & 63)); }

  std::uint64_t count() const noexcept;
  bool is_empty() const noexcept;
  Rational measure() const { return dyadic_measure(count(), resolution_); }
  std::vector<Cell> cells() const;

  template <typename Fn>
  void for_each_cell(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = __builtin_ctzll(bits);
        fn(static_cast<Cell>((w << 6) | static_cast<unsigned>(bit)));
        bits &= bits - 1;
      }
    }
  }

  DyadicSet refine(int resolution) const;

  DyadicSet complement() const;
  DyadicSet operator|(const DyadicSet& other) const;
  DyadicSet operator&(const DyadicSet& other) const;
  DyadicSet operator^(const DyadicSet& other) const;
  /// Set difference.
  DyadicSet operator-(const DyadicSet& other) const;
  DyadicSet& operator|=(const DyadicSet& other);
  DyadicSet& operator&=(const DyadicSet& other);

  bool subset_of(const DyadicSet& other) const;
  bool disjoint_from(const DyadicSet& other) const;
  /// |A ∩ B| in cells at the finer of the two resolutions.
  std::uint64_t intersection_count(const DyadicSet& other) const;

  /// Equality in the measure algebra: compares after refinement.
  bool operator==(const DyadicSet& other) const;

  /// Little-endian bitmap: byte k holds cells 8k..8k+7, bit i of the byte is cell 8k+i.
  std::string to_hex() const;
  static DyadicSet from_hex(int resolution, std::string_view hex);

  std::span<const std::uint64_t> words() const noexcept { return words_; }

 private:
  void clear_padding() noexcept;

  int resolution_;
  std::vector<std::uint64_t> words_;
};

enum class SetOp { kUnion, kIntersect, kComplement, kSymdiff };

/// Dispatch form of the boolean operations; `b` is ignored for kComplement.
DyadicSet set_algebra(const DyadicSet& a, const DyadicSet& b, SetOp op);

/// Measure-algebra distance μ(A Δ B).
Rational symmetric_distance(const DyadicSet& a, const DyadicSet& b);

}  // namespace dyadic
