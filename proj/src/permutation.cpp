#include "dyadic/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "dyadic/config.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {

DyadicPermutation::DyadicPermutation(int resolution, std::vector<Cell> images)
    : resolution_(resolution), images_(std::move(images)) {
  check_resolution(resolution);
  const std::uint64_t cells = std::uint64_t{1} << resolution;
  if (images_.size() != cells) {
    throw InvalidInput("permutation at resolution " + std::to_string(resolution) + " needs " +
                       std::to_string(cells) + " images, got " + std::to_string(images_.size()));
  }
  std::vector<bool> hit(cells, false);
  for (Cell c : images_) {
    if (c >= cells || hit[c]) {
      throw InvalidInput("cell map is not a bijection (image " + std::to_string(c) + ")");
    }
    hit[c] = true;
  }
}

DyadicPermutation DyadicPermutation::identity(int resolution) {
  check_resolution(resolution);
  std::vector<Cell> images(std::size_t{1} << resolution);
  std::iota(images.begin(), images.end(), Cell{0});
  return DyadicPermutation(Unchecked{}, resolution, std::move(images));
}

bool DyadicPermutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

DyadicPermutation DyadicPermutation::refine(int resolution) const {
  if (resolution < resolution_) throw InvalidInput("refine target is coarser than the permutation");
  if (resolution == resolution_) return *this;
  check_resolution(resolution);
  const int d = resolution - resolution_;
  std::vector<Cell> out(std::size_t{1} << resolution);
  const Cell mask = (Cell{1} << d) - 1;
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = (images_[x >> d] << d) | (static_cast<Cell>(x) & mask);
  }
  return DyadicPermutation(Unchecked{}, resolution, std::move(out));
}

bool DyadicPermutation::operator==(const DyadicPermutation& other) const {
  if (resolution_ == other.resolution_) return images_ == other.images_;
  const int n = std::max(resolution_, other.resolution_);
  return refine(n).images_ == other.refine(n).images_;
}

DyadicPermutation compose(const DyadicPermutation& s, const DyadicPermutation& t) {
  const int n = std::max(s.resolution(), t.resolution());
  if (s.resolution() != n) return compose(s.refine(n), t);
  if (t.resolution() != n) return compose(s, t.refine(n));
  std::vector<Cell> out(s.images_.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = s.images_[t.images_[x]];
  return DyadicPermutation(DyadicPermutation::Unchecked{}, n, std::move(out));
}

DyadicPermutation inverse(const DyadicPermutation& t) {
  std::vector<Cell> out(t.images_.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[t.images_[x]] = static_cast<Cell>(x);
  return DyadicPermutation(DyadicPermutation::Unchecked{}, t.resolution_, std::move(out));
}

DyadicPermutation power(const DyadicPermutation& t, std::int64_t k) {
  if (k == 0) return DyadicPermutation::identity(t.resolution());
  if (k == 1) return t;
  return CycleIndex(t).power(k);
}

CycleIndex::CycleIndex(const DyadicPermutation& t) : resolution_(t.resolution()) {
  const std::size_t cells = t.cell_count();
  order_.reserve(cells);
  cycle_id_.assign(cells, 0);
  position_.assign(cells, 0);
  std::vector<bool> seen(cells, false);
  starts_.push_back(0);
  for (std::size_t s = 0; s < cells; ++s) {
    if (seen[s]) continue;
    const auto id = static_cast<std::uint32_t>(starts_.size() - 1);
    std::uint32_t pos = 0;
    Cell x = static_cast<Cell>(s);
    while (!seen[x]) {
      seen[x] = true;
      cycle_id_[x] = id;
      position_[x] = pos++;
      order_.push_back(x);
      x = t(x);
    }
    starts_.push_back(order_.size());
  }
}

Cell CycleIndex::apply_power(Cell x, std::int64_t k) const noexcept {
  const std::size_t c = cycle_id_[x];
  const auto len = static_cast<std::int64_t>(starts_[c + 1] - starts_[c]);
  std::int64_t pos = (static_cast<std::int64_t>(position_[x]) + k % len) % len;
  if (pos < 0) pos += len;
  return order_[starts_[c] + static_cast<std::size_t>(pos)];
}

DyadicPermutation CycleIndex::power(std::int64_t k) const {
  std::vector<Cell> out(order_.size());
  for (std::size_t c = 0; c + 1 < starts_.size(); ++c) {
    const std::size_t first = starts_[c];
    const auto len = static_cast<std::int64_t>(starts_[c + 1] - first);
    std::int64_t shift = k % len;
    if (shift < 0) shift += len;
    for (std::int64_t i = 0; i < len; ++i) {
      std::int64_t j = i + shift;
      if (j >= len) j -= len;
      out[order_[first + static_cast<std::size_t>(i)]] = order_[first + static_cast<std::size_t>(j)];
    }
  }
  return DyadicPermutation(DyadicPermutation::Unchecked{}, resolution_, std::move(out));
}

std::optional<std::uint64_t> CycleIndex::order(std::uint64_t limit) const {
  std::uint64_t acc = 1;
  for (std::size_t c = 0; c + 1 < starts_.size(); ++c) {
    const std::uint64_t len = starts_[c + 1] - starts_[c];
    const std::uint64_t g = std::gcd(acc, len);
    const std::uint64_t factor = len / g;
    if (acc > limit / factor) return std::nullopt;
    acc *= factor;
  }
  return acc;
}

DyadicSet push_forward(const DyadicPermutation& t, const DyadicSet& a) {
  if (a.resolution() < t.resolution()) return push_forward(t, a.refine(t.resolution()));
  if (a.resolution() > t.resolution()) return push_forward(t.refine(a.resolution()), a);
  DyadicSet out(a.resolution());
  a.for_each_cell([&](Cell c) { out.insert(t(c)); });
  return out;
}

Rational uniform_dist(const DyadicPermutation& s, const DyadicPermutation& t) {
  const int n = std::max(s.resolution(), t.resolution());
  if (s.resolution() != n || t.resolution() != n) return uniform_dist(s.refine(n), t.refine(n));
  std::uint64_t differ = 0;
  for (std::uint64_t x = 0; x < s.cell_count(); ++x) {
    if (s(static_cast<Cell>(x)) != t(static_cast<Cell>(x))) ++differ;
  }
  return dyadic_measure(differ, n);
}

StepFunction koopman(const DyadicPermutation& t, const StepFunction& f) {
  const int n = std::max(t.resolution(), f.resolution());
  if (t.resolution() != n) return koopman(t.refine(n), f);
  if (f.resolution() != n) return koopman(t, f.refine(n));
  std::vector<Rational> out(f.values().size());
  for (std::size_t x = 0; x < out.size(); ++x) out[t(static_cast<Cell>(x))] = f[static_cast<Cell>(x)];
  return StepFunction(n, std::move(out));
}

}  // namespace dyadic
