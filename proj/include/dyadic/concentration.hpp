#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dyadic::concentration {

enum class Family { kTorus, kSymmetricGroup, kHypercube };
enum class Metric { kL1, kL2, kHamming };

/// A metric probability space from a Lévy-family candidate, with metric normalized so
/// the diameter is at most 1.
struct Space {
  Family family = Family::kHypercube;
  int dimension = 1;
  Metric metric = Metric::kHamming;

  std::string name() const;
  double diameter() const;
};

Space hypercube(int dimension);
/// Torus T^d with mean angular ℓ₁ distance (circle distances in [0, 1/2]).
Space torus_power(int dimension);
Space symmetric_group(int dimension);
/// Stage n of the step-function tower: T^{2^n} with the angular root-mean-square
/// distance, i.e. L² distance between the step functions of angles.
Space levy_tower(int n);

struct ProfileRow {
  double epsilon = 0;
  double alpha = 0;
  double stderr_ = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// α̂(ε) = 1 − μ̂(B_ε(A)) for the canonical half-mass set A of the space
/// (closed ε-neighborhood). Sampling is split into fixed blocks with independent
/// seeded streams, so results do not depend on `threads`.
std::vector<ProfileRow> concentration_profile(const Space& space, const std::vector<double>& eps_grid,
                                              std::uint64_t samples, std::uint64_t seed,
                                              unsigned threads = 1);

/// Distance from a sampled point to the canonical set; exposed for tests.
double hypercube_distance(const std::vector<std::uint8_t>& bits);
double torus_distance(const std::vector<double>& angles, Metric metric);
double symmetric_distance(const std::vector<std::uint32_t>& perm);

/// Empirical measure of the stage-n half-space pulled back along the coordinate
/// projection from stage n+1 (every other coordinate).
double tower_pullback_measure(int n, std::uint64_t samples, std::uint64_t seed);
double tower_half_space_measure(int n, std::uint64_t samples, std::uint64_t seed);

/// CSV with header family,d,eps,alpha,stderr,samples,seed.
std::string to_csv(const Space& space, const std::vector<ProfileRow>& rows);

}  // namespace dyadic::concentration
