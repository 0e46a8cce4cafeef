#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/group_truncation.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/step_function.hpp"

namespace dyadic {

/// A group truncation with, for each m in [1, max_m], the elements lying in U_m.
class ActionTruncation {
 public:
  struct Member {
    std::size_t index;
    Rational defect;
  };

  /// max_m defaults to the resolution (the finest meaningful U_m).
  explicit ActionTruncation(GroupTruncation group, std::optional<int> max_m = std::nullopt);

  const GroupTruncation& group() const noexcept { return group_; }
  int resolution() const noexcept { return group_.resolution(); }
  int max_m() const noexcept { return static_cast<int>(filters_.size()); }
  /// Elements of the truncation in U_m, identity first. Throws for m outside [1, max_m].
  const std::vector<Member>& filter(int m) const;
  /// Element indices of filter(m).
  std::vector<std::size_t> filter_indices(int m) const;
  /// True when filter(m+1) ⊂ filter(m) for every m < max_m.
  bool filters_nested() const;

 private:
  GroupTruncation group_;
  std::vector<std::vector<Member>> filters_;
};

/// UA = ∪ {γA : γ ∈ elements}.
DyadicSet orbit_thicken(const DyadicSet& a, const std::vector<DyadicPermutation>& elements);
/// U_m A using the filter of the action.
DyadicSet orbit_thicken(const DyadicSet& a, const ActionTruncation& action, int m);

/// Ã_depth = ∩_{m=1}^{depth} U_m A. Throws ConstructionFailure("insufficient-truncation")
/// when depth exceeds the filters of the action.
DyadicSet tilde(const DyadicSet& a, const ActionTruncation& action, int depth);

struct StabilityReport {
  bool stable = false;
  /// μ(Ã_depth \ A).
  Rational defect;
};
StabilityReport is_stable(const DyadicSet& a, const ActionTruncation& action, int depth);

/// Smallest stable superset: tilde iterated to its fixed point.
DyadicSet stable_hull(const DyadicSet& a, const ActionTruncation& action, int depth);
/// Union of the orbits of the group generated by filter(depth) contained in A. For
/// nested filters this is the largest subset B of A with Ã_depth = B.
DyadicSet stable_interior(const DyadicSet& a, const ActionTruncation& action, int depth);
/// Number of orbits of the group generated by filter(depth).
std::size_t filter_orbit_count(const ActionTruncation& action, int depth);

/// One-step transitivity of filter(m): for every pair of cells (x, y) some u in U_m has
/// u x = y, so μ(uA ∩ B) > 0 for all non-null A, B. The finite form of whirly at scale m.
bool is_whirly_at(const ActionTruncation& action, int m);

struct Separation {
  DyadicSet d;
  /// k = m + 2 where m is the scale used.
  int k = 0;
  int m = 0;
  Rational complement_gap;  // μ(Aᶜ \ D)
};

/// For stable A: smallest m with μ(U_m A \ A) < ε, E = (U_m A)ᶜ, D = stable hull of E
/// at `depth`, k = m + 2. Returns the first m whose D satisfies D ⊂ Aᶜ,
/// μ(Aᶜ \ D) < ε and μ(U_k A ∩ U_k D) = 0. Throws ConstructionFailure("separation-failure").
Separation separate(const DyadicSet& a, const Rational& epsilon, const ActionTruncation& action,
                    int depth);

struct ContinuityRow {
  int level = 0;
  int m = 0;
  /// max over u in filter(m) of ‖f∘u − f‖_∞.
  Rational oscillation;
  /// 2^{-(level-1)}.
  Rational bound;
  bool verified = false;
};

struct UrysohnResult {
  enum class Status { kComplete, kPartial, kDegenerate };
  Status status = Status::kPartial;
  StepFunction f;
  /// μ of the union of the sets D_r.
  Rational coverage;
  /// ‖f − 1_A‖₂².
  Rational l2_error_squared;
  bool within_epsilon = false;
  std::vector<ContinuityRow> certificate;
  /// Dyadic values r with their (possibly empty) level sets D_r, in increasing r.
  std::vector<std::pair<Rational, DyadicSet>> level_sets;
  std::vector<int> scales;  // m_0, m_1, ...
  std::vector<std::string> log;
};

std::string to_string(UrysohnResult::Status status);

/// Binary-tree construction of disjoint stable sets D_r with f = Σ r·1_{D_r}:
/// D_1 ⊂ A and D_0 ⊂ Aᶜ from the stable interior and the separation step, then at
/// each level the stable hull of the part of E_n = (∪ U_{m_n} D_r)ᶜ inside each
/// interval region gives the midpoint sets, and m_{n+1} > m_n + 2 is the smallest
/// scale with Σ μ(U D_r \ D_r) < 2^{-(n+1)} and pairwise disjoint U D_r.
/// Stability is taken at `depth` (tilde over filters 1..depth).
UrysohnResult urysohn(const DyadicSet& a, const Rational& epsilon, const ActionTruncation& action,
                      int depth, int max_levels = 8);

/// Mean of koopman(h, f) over h ∈ H. H must be closed under inverses and products;
/// otherwise throws InvalidInput naming the violating product.
StepFunction h_average(const StepFunction& f, const std::vector<DyadicPermutation>& group);

/// Every transposition of two cells together with the identity.
GroupTruncation transposition_group(int resolution);

}  // namespace dyadic
