#include "dyadic/mixing.hpp"

#include "dyadic/errors.hpp"

namespace dyadic {

Rational mixing_score(const DyadicPermutation& t, std::int64_t horizon,
                      const std::vector<SetPair>& pairs) {
  if (horizon < 1) throw InvalidInput("mixing horizon must be >= 1");
  if (pairs.empty()) throw InvalidInput("mixing score needs at least one pair");
  Rational worst = 0;
  for (const auto& [a0, b0] : pairs) {
    const int n = std::max({t.resolution(), a0.resolution(), b0.resolution()});
    const DyadicPermutation tn = t.refine(n);
    const DyadicSet b = b0.refine(n);
    DyadicSet image = a0.refine(n);
    const std::uint64_t ca = image.count();
    const std::uint64_t cb = b.count();
    if (ca == 0 || cb == 0) throw InvalidInput("mixing score needs non-null sets");
    // |μ(T^kA∩B) − μAμB| / μAμB = |2^n·|T^kA∩B| − |A||B|| / (|A||B|)
    const Integer product = Integer(ca) * Integer(cb);
    const Integer scale = Integer(1) << n;
    Integer best = -1;
    for (std::int64_t k = 1; k <= horizon; ++k) {
      image = push_forward(tn, image);
      Integer diff = scale * Integer(image.intersection_count(b)) - product;
      if (diff < 0) diff = -diff;
      if (best < 0 || diff < best) best = diff;
      if (best == 0) break;
    }
    worst = std::max(worst, Rational(best, product));
  }
  return worst;
}

}  // namespace dyadic
