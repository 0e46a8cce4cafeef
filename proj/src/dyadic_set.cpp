#include "dyadic/dyadic_set.hpp"

#include <algorithm>
#include <bit>

#include "dyadic/config.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

std::size_t word_count(int resolution) {
  const std::uint64_t cells = std::uint64_t{1} << resolution;
  return static_cast<std::size_t>((cells + 63) / 64);
}

// Aligns two sets to the finer resolution without copying the finer one.
template <typename Fn>
DyadicSet combine(const DyadicSet& a, const DyadicSet& b, Fn&& fn) {
  const int n = std::max(a.resolution(), b.resolution());
  DyadicSet left = a.resolution() == n ? a : a.refine(n);
  const DyadicSet* right = &b;
  DyadicSet refined;
  if (b.resolution() != n) {
    refined = b.refine(n);
    right = &refined;
  }
  return fn(std::move(left), *right);
}

}  // namespace

DyadicSet::DyadicSet(int resolution) : resolution_(resolution) {
  check_resolution(resolution);
  words_.assign(word_count(resolution), 0);
}

DyadicSet DyadicSet::full(int resolution) {
  DyadicSet s(resolution);
  std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  s.clear_padding();
  return s;
}

DyadicSet DyadicSet::from_cells(int resolution, std::span<const Cell> cells) {
  DyadicSet s(resolution);
  for (Cell c : cells) {
    if (c >= s.cell_count()) {
      throw InvalidInput("cell " + std::to_string(c) + " out of range at resolution " +
                         std::to_string(resolution));
    }
    s.insert(c);
  }
  return s;
}

DyadicSet DyadicSet::cell_range(int resolution, std::uint64_t first, std::uint64_t last) {
  DyadicSet s(resolution);
  if (first > last || last > s.cell_count()) throw InvalidInput("cell range out of bounds");
  for (std::uint64_t c = first; c < last; ++c) s.insert(static_cast<Cell>(c));
  return s;
}

DyadicSet DyadicSet::interval(int resolution, const Rational& lo, const Rational& hi) {
  if (lo < 0 || hi > 1 || lo > hi) throw InvalidInput("interval must satisfy 0 <= lo <= hi <= 1");
  const Rational scale = pow2(resolution);
  const Rational first = lo * scale;
  const Rational last = hi * scale;
  if (denominator(first) != 1 || denominator(last) != 1) {
    throw PrecisionError("interval endpoints are not multiples of 2^-" +
                         std::to_string(resolution));
  }
  return cell_range(resolution, numerator(first).convert_to<std::uint64_t>(),
                    numerator(last).convert_to<std::uint64_t>());
}

DyadicSet DyadicSet::block(int resolution, int m, std::uint64_t j) {
  if (m > resolution) throw PrecisionError("block J^(m) needs resolution >= m");
  if (j >= (std::uint64_t{1} << m)) throw InvalidInput("block index out of range");
  const int shift = resolution - m;
  return cell_range(resolution, j << shift, (j + 1) << shift);
}

void DyadicSet::clear_padding() noexcept {
  const std::uint64_t cells = cell_count();
  if (cells % 64 != 0) words_.back() &= (std::uint64_t{1} << (cells % 64)) - 1;
}

std::uint64_t DyadicSet::count() const noexcept {
  std::uint64_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

bool DyadicSet::is_empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<Cell> DyadicSet::cells() const {
  std::vector<Cell> out;
  out.reserve(count());
  for_each_cell([&](Cell c) { out.push_back(c); });
  return out;
}

DyadicSet DyadicSet::refine(int resolution) const {
  if (resolution < resolution_) {
    throw InvalidInput("refine target " + std::to_string(resolution) + " is coarser than " +
                       std::to_string(resolution_));
  }
  if (resolution == resolution_) return *this;
  DyadicSet out(resolution);
  const int d = resolution - resolution_;
  const std::uint64_t children = std::uint64_t{1} << d;
  for_each_cell([&](Cell c) {
    const std::uint64_t first = static_cast<std::uint64_t>(c) << d;
    if (children >= 64) {
      for (std::uint64_t w = first / 64; w < (first + children) / 64; ++w) out.words_[w] = ~0ULL;
    } else {
      for (std::uint64_t k = 0; k < children; ++k) out.insert(static_cast<Cell>(first + k));
    }
  });
  return out;
}

DyadicSet DyadicSet::complement() const {
  DyadicSet out(*this);
  for (auto& w : out.words_) w = ~w;
  out.clear_padding();
  return out;
}

DyadicSet DyadicSet::operator|(const DyadicSet& other) const {
  return combine(*this, other, [](DyadicSet l, const DyadicSet& r) {
    for (std::size_t i = 0; i < l.words_.size(); ++i) l.words_[i] |= r.words_[i];
    return l;
  });
}

DyadicSet DyadicSet::operator&(const DyadicSet& other) const {
  return combine(*this, other, [](DyadicSet l, const DyadicSet& r) {
    for (std::size_t i = 0; i < l.words_.size(); ++i) l.words_[i] &= r.words_[i];
    return l;
  });
}

DyadicSet DyadicSet::operator^(const DyadicSet& other) const {
  return combine(*this, other, [](DyadicSet l, const DyadicSet& r) {
    for (std::size_t i = 0; i < l.words_.size(); ++i) l.words_[i] ^= r.words_[i];
    return l;
  });
}

DyadicSet DyadicSet::operator-(const DyadicSet& other) const {
  return combine(*this, other, [](DyadicSet l, const DyadicSet& r) {
    for (std::size_t i = 0; i < l.words_.size(); ++i) l.words_[i] &= ~r.words_[i];
    return l;
  });
}

DyadicSet& DyadicSet::operator|=(const DyadicSet& other) {
  if (other.resolution_ == resolution_) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }
  return *this = *this | other;
}

DyadicSet& DyadicSet::operator&=(const DyadicSet& other) {
  if (other.resolution_ == resolution_) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }
  return *this = *this & other;
}

bool DyadicSet::subset_of(const DyadicSet& other) const { return (*this - other).is_empty(); }

bool DyadicSet::disjoint_from(const DyadicSet& other) const {
  return intersection_count(other) == 0;
}

std::uint64_t DyadicSet::intersection_count(const DyadicSet& other) const {
  if (other.resolution_ == resolution_) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      total += static_cast<std::uint64_t>(std::popcount(words_[i] & other.words_[i]));
    }
    return total;
  }
  return (*this & other).count();
}

bool DyadicSet::operator==(const DyadicSet& other) const {
  if (resolution_ == other.resolution_) return words_ == other.words_;
  return (*this ^ other).is_empty();
}

std::string DyadicSet::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::uint64_t bytes = std::max<std::uint64_t>(1, cell_count() / 8);
  std::string out;
  out.reserve(bytes * 2);
  for (std::uint64_t k = 0; k < bytes; ++k) {
    const auto byte = static_cast<unsigned>((words_[k / 8] >> ((k % 8) * 8)) & 0xFF);
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xF]);
  }
  return out;
}

DyadicSet DyadicSet::from_hex(int resolution, std::string_view hex) {
  DyadicSet s(resolution);
  const std::uint64_t bytes = std::max<std::uint64_t>(1, s.cell_count() / 8);
  if (hex.size() != bytes * 2) {
    throw InvalidInput("hex bitmap for resolution " + std::to_string(resolution) + " must have " +
                       std::to_string(bytes * 2) + " digits, got " + std::to_string(hex.size()));
  }
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw InvalidInput(std::string("bad hex digit '") + c + "'");
  };
  for (std::uint64_t k = 0; k < bytes; ++k) {
    const std::uint64_t byte = (nibble(hex[2 * k]) << 4) | nibble(hex[2 * k + 1]);
    s.words_[k / 8] |= byte << ((k % 8) * 8);
  }
  const std::uint64_t before = s.count();
  s.clear_padding();
  if (s.count() != before) throw InvalidInput("hex bitmap sets cells beyond 2^resolution");
  return s;
}

DyadicSet set_algebra(const DyadicSet& a, const DyadicSet& b, SetOp op) {
  switch (op) {
    case SetOp::kUnion:
      return a | b;
    case SetOp::kIntersect:
      return a & b;
    case SetOp::kComplement:
      return a.complement();
    case SetOp::kSymdiff:
      return a ^ b;
  }
  throw InvalidInput("unknown set operation");
}

Rational symmetric_distance(const DyadicSet& a, const DyadicSet& b) { return (a ^ b).measure(); }

}  // namespace dyadic
