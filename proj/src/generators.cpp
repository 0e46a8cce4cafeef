#include "dyadic/generators.hpp"

#include <charconv>
#include <numeric>
#include <string>
#include <vector>

#include "dyadic/config.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

std::uint64_t isqrt(std::uint64_t v) {
  std::uint64_t r = 0;
  for (std::uint64_t bit = std::uint64_t{1} << 62; bit != 0; bit >>= 2) {
    if (v >= r + bit) {
      v -= r + bit;
      r = (r >> 1) + bit;
    } else {
      r >>= 1;
    }
  }
  return r;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int = std::int64_t>
Int parse_int(std::string_view s, std::string_view spec) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInput("bad integer '" + std::string(s) + "' in generator '" + std::string(spec) + "'");
  }
  return v;
}

int parse_resolution(std::string_view s, std::string_view spec) {
  const std::int64_t n = parse_int(s, spec);
  if (n < 0 || n > 30) throw InvalidInput("bad resolution in generator '" + std::string(spec) + "'");
  check_resolution(static_cast<int>(n));
  return static_cast<int>(n);
}

}  // namespace

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % bound;
}

DyadicPermutation dyadic_shift(std::int64_t k, int resolution) {
  check_resolution(resolution);
  const std::int64_t cells = std::int64_t{1} << resolution;
  std::int64_t s = k % cells;
  if (s < 0) s += cells;
  std::vector<Cell> images(static_cast<std::size_t>(cells));
  for (std::int64_t x = 0; x < cells; ++x) images[static_cast<std::size_t>(x)] = static_cast<Cell>((x + s) % cells);
  return DyadicPermutation(resolution, std::move(images));
}

std::int64_t snapped_shift(const Rational& alpha, int resolution) {
  const Rational scaled = alpha * pow2(resolution) + Rational(1, 2);
  Integer q = numerator(scaled) / denominator(scaled);
  if (numerator(scaled) < 0 && q * denominator(scaled) != numerator(scaled)) q -= 1;  // floor
  return q.convert_to<std::int64_t>();
}

DyadicPermutation rotation_convergent(std::int64_t p, std::int64_t q, int resolution) {
  if (q == 0) throw InvalidInput("rotation p/q needs q != 0");
  return dyadic_shift(snapped_shift(Rational(p, q), resolution), resolution);
}

DyadicPermutation baker(int resolution) {
  check_resolution(resolution);
  const int n = resolution;
  const std::uint64_t cells = std::uint64_t{1} << n;
  if (n == 0) return DyadicPermutation::identity(0);
  const std::uint64_t mask = cells - 1;
  // floor(2^n (√5 − 1)/2) via isqrt(5·4^n) = floor(√5·2^n), forced odd.
  const std::uint64_t golden = ((isqrt(5 * cells * cells) - cells) / 2) | 1;
  std::vector<Cell> images(cells);
  for (std::uint64_t x = 0; x < cells; ++x) {
    const std::uint64_t rot = ((x << 1) | (x >> (n - 1))) & mask;
    images[x] = static_cast<Cell>((rot + golden) & mask);
  }
  // Join cycles: swapping the images of a (in the merged cycle) and b (in the next
  // cycle) splices the two cycles into one.
  std::vector<bool> seen(cells, false);
  std::vector<Cell> minima;
  for (std::uint64_t s = 0; s < cells; ++s) {
    if (seen[s]) continue;
    minima.push_back(static_cast<Cell>(s));
    for (Cell x = static_cast<Cell>(s); !seen[x]; x = images[x]) seen[x] = true;
  }
  for (std::size_t i = 1; i < minima.size(); ++i) std::swap(images[minima[0]], images[minima[i]]);
  return DyadicPermutation(resolution, std::move(images));
}

DyadicPermutation random_cycle(int resolution, std::uint64_t seed) {
  check_resolution(resolution);
  const std::size_t cells = std::size_t{1} << resolution;
  std::vector<Cell> order(cells);
  std::iota(order.begin(), order.end(), Cell{0});
  SplitMix64 rng(seed);
  // Sattolo: a uniformly random cyclic ordering.
  for (std::size_t i = cells - 1; i > 0; --i) std::swap(order[i], order[rng.below(i)]);
  std::vector<Cell> images(cells);
  for (std::size_t i = 0; i < cells; ++i) images[order[i]] = order[(i + 1) % cells];
  return DyadicPermutation(resolution, std::move(images));
}

DyadicSet random_set(int resolution, std::uint64_t count, std::uint64_t seed) {
  DyadicSet s(resolution);
  const std::uint64_t cells = s.cell_count();
  if (count > cells) throw InvalidInput("random set larger than the space");
  std::vector<Cell> order(cells);
  std::iota(order.begin(), order.end(), Cell{0});
  SplitMix64 rng(seed);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + rng.below(cells - i)]);
    s.insert(order[i]);
  }
  return s;
}

DyadicPermutation parse_generator(std::string_view spec) {
  const auto parts = split(spec, ':');
  const std::string_view kind = parts[0];
  if (kind == "id" && parts.size() == 2) {
    return DyadicPermutation::identity(parse_resolution(parts[1], spec));
  }
  if (kind == "shift" && parts.size() == 3) {
    return dyadic_shift(parse_int(parts[1], spec), parse_resolution(parts[2], spec));
  }
  if (kind == "rot" && parts.size() == 3) {
    const Rational alpha = parse_rational(parts[1]);
    return dyadic_shift(snapped_shift(alpha, parse_resolution(parts[2], spec)),
                        parse_resolution(parts[2], spec));
  }
  if (kind == "baker" && parts.size() == 2) return baker(parse_resolution(parts[1], spec));
  if (kind == "rand" && (parts.size() == 2 || parts.size() == 3)) {
    std::uint64_t seed = 0;
    if (parts.size() == 3) {
      if (parts[2].substr(0, 5) != "seed=") {
        throw InvalidInput("expected seed=<s> in generator '" + std::string(spec) + "'");
      }
      seed = parse_int<std::uint64_t>(parts[2].substr(5), spec);
    }
    return random_cycle(parse_resolution(parts[1], spec), seed);
  }
  throw InvalidInput("unknown generator spec '" + std::string(spec) + "'");
}

}  // namespace dyadic
