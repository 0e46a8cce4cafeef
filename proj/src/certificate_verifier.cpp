// Recomputes a certificate from its raw data without the construction's shortcuts:
// S^{n₀} by repeated composition, block defects from explicit block sets.
#include <vector>

#include "dyadic/perturbation.hpp"

namespace dyadic {
namespace {

bool is_bijection(std::span<const Cell> images) {
  std::vector<char> seen(images.size(), 0);
  for (Cell y : images) {
    if (y >= images.size() || seen[y]) return false;
    seen[y] = 1;
  }
  return true;
}

}  // namespace

VerificationReport verify_certificate(const WhirlyCertificate& cert) {
  VerificationReport report;
  const auto violate = [&](std::string what) {
    report.ok = false;
    report.violations.push_back(std::move(what));
  };

  const int r = cert.s.resolution();
  if (cert.t0.resolution() != r || cert.a.resolution() != r || cert.b.resolution() != r ||
      !is_bijection(cert.s.images()) || !is_bijection(cert.t0.images())) {
    violate("bijectivity");
    return report;
  }
  if (cert.m < 0 || cert.m > r || cert.n0 < 1) {
    violate("parameters");
    return report;
  }

  const std::uint64_t cells = std::uint64_t{1} << r;
  std::uint64_t differing = 0;
  for (std::uint64_t x = 0; x < cells; ++x) {
    if (cert.s(static_cast<Cell>(x)) != cert.t0(static_cast<Cell>(x))) ++differing;
  }
  report.closeness = dyadic_measure(differing, r);

  std::vector<Cell> power(cells);
  for (std::uint64_t x = 0; x < cells; ++x) power[x] = static_cast<Cell>(x);
  for (std::int64_t i = 0; i < cert.n0; ++i) {
    for (auto& y : power) y = cert.s(y);
  }
  const DyadicPermutation sn0(r, power);

  report.um_defect = 0;
  std::uint64_t worst_block = 0;
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << cert.m); ++j) {
    const DyadicSet block = DyadicSet::block(r, cert.m, j);
    const Rational defect = (push_forward(sn0, block) ^ block).measure();
    if (defect > report.um_defect) {
      report.um_defect = defect;
      worst_block = j;
    }
  }

  report.bound_lhs = (push_forward(sn0, cert.a) & cert.b).measure();
  report.bound_rhs = cert.delta * cert.a.measure() * cert.b.measure();

  if (!(report.closeness < cert.epsilon)) violate("closeness");
  if (!(report.um_defect < pow2(-2 * cert.m))) violate("um_defect");
  if (!(report.bound_lhs > report.bound_rhs)) violate("intersection_bound");
  if (cert.delta <= 0) violate("bound_rhs");
  if (report.closeness != cert.closeness) violate("closeness mismatch");
  if (report.um_defect != cert.um_defect) violate("um_defect mismatch");
  if (report.um_defect > 0 && worst_block != cert.um_worst_block) violate("um_worst_block mismatch");
  if (report.bound_lhs != cert.bound_lhs) violate("bound_lhs mismatch");
  if (report.bound_rhs != cert.bound_rhs) violate("bound_rhs mismatch");
  return report;
}

}  // namespace dyadic
