#pragma once

#include <utility>
#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

using SetPair = std::pair<DyadicSet, DyadicSet>;

/// max over pairs of min over 1 ≤ k ≤ horizon of |μ(T^k A ∩ B) − μ(A)μ(B)| / (μ(A)μ(B)).
/// Lower means more mixing. Pairs with a null side are rejected.
Rational mixing_score(const DyadicPermutation& t, std::int64_t horizon,
                      const std::vector<SetPair>& pairs);

}  // namespace dyadic
