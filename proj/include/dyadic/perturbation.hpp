#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/mixing.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

struct PerturbationParams {
  int m = 1;
  /// Budget for μ{S ≠ T₀}.
  Rational epsilon{1, 32};
  /// Relative orbit-frequency tolerance, also the allowed fraction of bad start cells.
  Rational eta{1, 100};
  /// Search bound for the return time n₀.
  std::int64_t horizon = 1 << 12;
  /// Fraction of the tower base given period N; defaults to 2^{-2m}.
  std::optional<Rational> gamma;
  /// Intersection constant; defaults to γ/10.
  std::optional<Rational> delta;
  /// Precondition on T₀: mixing_score over (A,B) with this horizon must not exceed the threshold.
  std::int64_t mixing_horizon = 64;
  Rational mixing_threshold{1, 2};
  /// When true, a failed orbit-frequency search aborts instead of falling back to
  /// the shortest admissible tower.
  bool strict_frequency = false;
  /// Number of doublings of the block count n after a failed certificate.
  int retry_cap = 4;

  Rational gamma_value() const;
  Rational delta_value() const;
  /// ceil(10/ε), the least admissible n₀.
  std::int64_t min_return_time() const;
  void validate() const;
};

/// The three inequalities of the perturbation, together with everything needed to
/// recheck them: T₀, S, A, B and the parameters.
struct WhirlyCertificate {
  int m = 1;
  Rational epsilon;
  Rational gamma;
  Rational delta;
  std::int64_t n0 = 0;
  std::int64_t height = 0;
  std::int64_t blocks = 0;
  /// μ{x : S x ≠ T₀ x}; must be < ε.
  Rational closeness;
  /// Worst U_m defect of S^{n₀}; must be < 2^{-2m}.
  Rational um_defect;
  std::uint64_t um_worst_block = 0;
  /// μ(S^{n₀} A ∩ B); must exceed bound_rhs = δ μ(A) μ(B).
  Rational bound_lhs;
  Rational bound_rhs;

  DyadicPermutation t0;
  DyadicPermutation s;
  DyadicSet a;
  DyadicSet b;

  /// The three inequalities on the recorded values only.
  bool inequalities_hold() const;
};

enum class PerturbationStatus {
  kCertified,
  kNoMixing,
  kFrequencyFailure,
  kTowerInfeasible,
  kCertificateFailure,
};

std::string to_string(PerturbationStatus status);

struct PerturbationDiagnostics {
  Rational mixing_score;
  /// μ(T₀^{n₀} A ∩ B) for the chosen n₀.
  Rational return_intersection;
  std::int64_t frequency_window = 0;
  Rational frequency_good_fraction;
  bool frequency_passed = false;
  Rational remainder;
  std::uint64_t base_cells = 0;
  std::uint64_t gamma_cells = 0;
  int attempts = 0;
  std::vector<std::string> log;
};

struct PerturbationResult {
  PerturbationStatus status = PerturbationStatus::kNoMixing;
  std::string message;
  /// Present for kCertified and kCertificateFailure.
  std::optional<WhirlyCertificate> certificate;
  PerturbationDiagnostics diagnostics;

  bool certified() const noexcept { return status == PerturbationStatus::kCertified; }
};

/// Builds S close to T₀ with S^{n₀} ∈ U_m and μ(S^{n₀}A ∩ B) > δ μ(A)μ(B):
///  1. smallest n₀ ≥ ceil(10/ε) with μ(T₀^{n₀}A ∩ B) > μ(A)μ(B)/2, D = T₀^{n₀}A ∩ B;
///  2. orbit windows of length n: frequencies of D and of each J^{(m)}_j within
///     relative η on a (1−η) fraction of cells;
///  3. Rohlin tower of height N = n·n₀ with remainder < ε/2;
///  4. base split: first ceil(γ·|base|) base cells (index order) form the γ-part;
///  5. S = T₀ on the floors except at ceilings, where the γ-columns wrap with period
///     N and each n₀-block of the other columns wraps with period n₀; S = Id on the
///     remainder;
///  6. every inequality is recomputed and checked; on failure n is doubled up to
///     retry_cap times before returning kCertificateFailure.
PerturbationResult whirly_perturb(const DyadicPermutation& t0, const DyadicSet& a,
                                  const DyadicSet& b, const PerturbationParams& params);

struct VerificationReport {
  bool ok = true;
  /// Names of the violated checks: "bijectivity", "closeness", "um_defect",
  /// "intersection_bound", "bound_rhs", or "<field> mismatch" for recorded values
  /// that differ from the recomputation.
  std::vector<std::string> violations;
  Rational closeness;
  Rational um_defect;
  Rational bound_lhs;
  Rational bound_rhs;
};

/// Independent recheck from raw data: S^{n₀} by repeated composition, defects from
/// block sets and push-forwards, intersections from bitmaps.
VerificationReport verify_certificate(const WhirlyCertificate& cert);

/// Smallest |n| ≤ search_bound (positive first) with T^n ∈ U_m and
/// μ(T^nA ∩ B) > δ μ(A) μ(B); δ defaults to 2^{-2m}/10.
std::optional<std::int64_t> v_km_member(const DyadicPermutation& t, const DyadicSet& a,
                                        const DyadicSet& b, int m, std::int64_t search_bound,
                                        std::optional<Rational> delta = std::nullopt,
                                        bool allow_zero = true, unsigned threads = 1);

enum class PairKind { kIntervals, kDisjointIntervals, kRandomSets };

struct ScanConfig {
  /// Generator specs; "rand:n" without a seed draws one seed per spec from `seed`.
  std::vector<std::string> samplers;
  std::size_t pair_count = 20;
  int m_max = 2;
  std::int64_t search_bound = 1 << 10;
  std::uint64_t seed = 1;
  PairKind pairs = PairKind::kIntervals;
  bool allow_zero = false;
  unsigned threads = 1;
};

struct ScanRow {
  std::string sampler;
  int m = 0;
  std::size_t passes = 0;
  std::size_t pairs = 0;
  Rational pass_rate;
};

/// Fraction of sampled pairs (A_k, B_k) with a V_{k,m} witness, per sampler and m ≤ m_max.
std::vector<ScanRow> generic_scan(const ScanConfig& config);

/// The pairs generic_scan uses at `resolution`.
std::vector<SetPair> scan_pairs(int resolution, std::size_t count, PairKind kind,
                                std::uint64_t seed);

}  // namespace dyadic
