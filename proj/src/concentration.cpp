#include "dyadic/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/parallel.hpp"

namespace dyadic::concentration {
namespace {

constexpr std::uint64_t kBlockSize = 4096;
constexpr double kTolerance = 1e-12;

double uniform01(SplitMix64& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

double circle(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (block + 1)));
  return mix.next();
}

double sample_distance(const Space& space, SplitMix64& rng, std::vector<std::uint8_t>& bits,
                       std::vector<double>& angles, std::vector<std::uint32_t>& perm) {
  switch (space.family) {
    case Family::kHypercube: {
      const auto d = static_cast<std::size_t>(space.dimension);
      bits.resize(d);
      for (std::size_t i = 0; i < d; i += 64) {
        const std::uint64_t word = rng.next();
        for (std::size_t j = i; j < std::min(d, i + 64); ++j) bits[j] = (word >> (j - i)) & 1U;
      }
      return hypercube_distance(bits);
    }
    case Family::kTorus:
      angles.resize(static_cast<std::size_t>(space.dimension));
      for (auto& a : angles) a = uniform01(rng);
      return torus_distance(angles, space.metric);
    case Family::kSymmetricGroup: {
      perm.resize(static_cast<std::size_t>(space.dimension));
      std::iota(perm.begin(), perm.end(), 0U);
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      return symmetric_distance(perm);
    }
  }
  return 0;
}

// |x|_c summed over coordinates, the defining statistic of the torus half-space.
double circle_mass(const std::vector<double>& angles) {
  double s = 0;
  for (double a : angles) s += circle(a);
  return s;
}

bool in_torus_half_space(const std::vector<double>& angles) {
  return circle_mass(angles) <= static_cast<double>(angles.size()) / 4.0;
}

}  // namespace

std::string Space::name() const {
  switch (family) {
    case Family::kHypercube: return "hypercube";
    case Family::kTorus: return metric == Metric::kL2 ? "levy_tower" : "torus";
    case Family::kSymmetricGroup: return "symmetric";
  }
  return "unknown";
}

double Space::diameter() const { return family == Family::kTorus ? 0.5 : 1.0; }

Space hypercube(int dimension) {
  if (dimension < 1) throw InvalidInput("hypercube dimension must be >= 1");
  return {Family::kHypercube, dimension, Metric::kHamming};
}

Space torus_power(int dimension) {
  if (dimension < 1) throw InvalidInput("torus dimension must be >= 1");
  return {Family::kTorus, dimension, Metric::kL1};
}

Space symmetric_group(int dimension) {
  if (dimension < 1) throw InvalidInput("symmetric group degree must be >= 1");
  return {Family::kSymmetricGroup, dimension, Metric::kHamming};
}

Space levy_tower(int n) {
  if (n < 0 || n > 8) throw InvalidInput("levy tower stage must lie in [0, 8]");
  return {Family::kTorus, 1 << n, Metric::kL2};
}

double hypercube_distance(const std::vector<std::uint8_t>& bits) {
  // A = {fewer than d/2 ones} ∪ {exactly d/2 ones and x_0 = 0}.
  const auto d = static_cast<std::int64_t>(bits.size());
  const auto ones = static_cast<std::int64_t>(std::count(bits.begin(), bits.end(), 1));
  std::int64_t flips = 0;
  if (d % 2 == 1) {
    flips = std::max<std::int64_t>(0, ones - d / 2);
  } else if (ones > d / 2) {
    flips = ones - d / 2;
  } else if (ones == d / 2 && !bits.empty() && bits[0] == 1) {
    flips = 1;
  }
  return static_cast<double>(flips) / static_cast<double>(d);
}

double torus_distance(const std::vector<double>& angles, Metric metric) {
  // A = {Σ|x_i| ≤ d/4}; shrinking coordinates toward 0 removes the excess.
  const auto d = static_cast<double>(angles.size());
  const double excess = circle_mass(angles) - d / 4.0;
  if (excess <= 0) return 0;
  if (metric == Metric::kL1) return excess / d;
  // Least-squares removal of the excess: δ_i = min(|x_i|, λ) with Σ δ_i = excess.
  std::vector<double> mags;
  mags.reserve(angles.size());
  for (double a : angles) mags.push_back(circle(a));
  std::sort(mags.begin(), mags.end());
  double remaining = excess;
  double squares = 0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    const double share = remaining / static_cast<double>(mags.size() - i);
    if (mags[i] <= share) {
      squares += mags[i] * mags[i];
      remaining -= mags[i];
    } else {
      squares += share * share * static_cast<double>(mags.size() - i);
      remaining = 0;
      break;
    }
  }
  return std::sqrt(squares / d);
}

double symmetric_distance(const std::vector<std::uint32_t>& perm) {
  // A = {σ with a fixed point}; a derangement reaches A by one transposition.
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] == i) return 0;
  }
  return std::min(1.0, 2.0 / static_cast<double>(perm.size()));
}

std::vector<ProfileRow> concentration_profile(const Space& space, const std::vector<double>& eps_grid,
                                              std::uint64_t samples, std::uint64_t seed,
                                              unsigned threads) {
  if (samples < 1) throw InvalidInput("concentration profile needs samples >= 1");
  if (space.dimension < 1) throw InvalidInput("degenerate space of dimension 0");
  if (eps_grid.empty()) throw InvalidInput("empty epsilon grid");
  for (double e : eps_grid) {
    if (!(e >= 0) || !std::isfinite(e)) throw InvalidInput("epsilon must be finite and >= 0");
  }
  const std::uint64_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<std::uint64_t>> outside(blocks, std::vector<std::uint64_t>(eps_grid.size(), 0));
  parallel_for(blocks, threads, [&](std::uint64_t block) {
    SplitMix64 rng(block_seed(seed, block));
    std::vector<std::uint8_t> bits;
    std::vector<double> angles;
    std::vector<std::uint32_t> perm;
    const std::uint64_t count = std::min(kBlockSize, samples - block * kBlockSize);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double dist = sample_distance(space, rng, bits, angles, perm);
      for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        if (dist > eps_grid[e] + kTolerance) ++outside[block][e];
      }
    }
  });
  std::vector<ProfileRow> rows;
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    std::uint64_t total = 0;
    for (const auto& b : outside) total += b[e];
    const double alpha = static_cast<double>(total) / static_cast<double>(samples);
    const double se = std::sqrt(alpha * (1 - alpha) / static_cast<double>(samples));
    rows.push_back({eps_grid[e], alpha, se, samples, seed});
  }
  return rows;
}

double tower_half_space_measure(int n, std::uint64_t samples, std::uint64_t seed) {
  const Space space = levy_tower(n);
  if (samples < 1) throw InvalidInput("samples must be >= 1");
  SplitMix64 rng(seed);
  std::vector<double> angles(static_cast<std::size_t>(space.dimension));
  std::uint64_t inside = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& a : angles) a = uniform01(rng);
    inside += in_torus_half_space(angles) ? 1 : 0;
  }
  return static_cast<double>(inside) / static_cast<double>(samples);
}

double tower_pullback_measure(int n, std::uint64_t samples, std::uint64_t seed) {
  const Space coarse = levy_tower(n);
  levy_tower(n + 1);
  if (samples < 1) throw InvalidInput("samples must be >= 1");
  SplitMix64 rng(seed);
  std::vector<double> fine(static_cast<std::size_t>(coarse.dimension) * 2);
  std::vector<double> projected(static_cast<std::size_t>(coarse.dimension));
  std::uint64_t inside = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& a : fine) a = uniform01(rng);
    for (std::size_t i = 0; i < projected.size(); ++i) projected[i] = fine[2 * i];
    inside += in_torus_half_space(projected) ? 1 : 0;
  }
  return static_cast<double>(inside) / static_cast<double>(samples);
}

std::string to_csv(const Space& space, const std::vector<ProfileRow>& rows) {
  std::string out = "family,d,eps,alpha,stderr,samples,seed\n";
  char line[256];
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%s,%d,%.6g,%.9g,%.9g,%llu,%llu\n", space.name().c_str(),
                  space.dimension, row.epsilon, row.alpha, row.stderr_,
                  static_cast<unsigned long long>(row.samples), static_cast<unsigned long long>(row.seed));
    out += line;
  }
  return out;
}

}  // namespace dyadic::concentration
