#include "dyadic/step_function.hpp"

#include <algorithm>

#include "dyadic/config.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {

StepFunction::StepFunction(int resolution, const Rational& constant) : resolution_(resolution) {
  check_resolution(resolution);
  values_.assign(std::size_t{1} << resolution, constant);
}

StepFunction::StepFunction(int resolution, std::vector<Rational> values)
    : resolution_(resolution), values_(std::move(values)) {
  check_resolution(resolution);
  if (values_.size() != (std::size_t{1} << resolution)) {
    throw InvalidInput("step function at resolution " + std::to_string(resolution) + " needs " +
                       std::to_string(std::size_t{1} << resolution) + " values, got " +
                       std::to_string(values_.size()));
  }
}

StepFunction StepFunction::indicator(const DyadicSet& set) {
  StepFunction f(set.resolution(), Rational(0));
  set.for_each_cell([&](Cell c) { f.values_[c] = 1; });
  return f;
}

StepFunction StepFunction::refine(int resolution) const {
  if (resolution < resolution_) throw InvalidInput("refine target is coarser than the function");
  if (resolution == resolution_) return *this;
  const int d = resolution - resolution_;
  std::vector<Rational> out(std::size_t{1} << resolution);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i >> d];
  return StepFunction(resolution, std::move(out));
}

namespace {

template <typename Op>
StepFunction pointwise(const StepFunction& f, const StepFunction& g, Op op) {
  const int n = std::max(f.resolution(), g.resolution());
  const StepFunction a = f.refine(n);
  const StepFunction b = g.refine(n);
  std::vector<Rational> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a.values()[i], b.values()[i]);
  return StepFunction(n, std::move(out));
}

}  // namespace

StepFunction StepFunction::operator+(const StepFunction& other) const {
  return pointwise(*this, other, [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

StepFunction StepFunction::operator-(const StepFunction& other) const {
  return pointwise(*this, other, [](const Rational& x, const Rational& y) { return Rational(x - y); });
}

StepFunction StepFunction::scaled(const Rational& factor) const {
  std::vector<Rational> out(values_);
  for (auto& v : out) v *= factor;
  return StepFunction(resolution_, std::move(out));
}

Rational StepFunction::integral() const {
  Rational sum = 0;
  for (const auto& v : values_) sum += v;
  return sum / Rational(values_.size());
}

Rational StepFunction::linf() const {
  Rational best = 0;
  for (const auto& v : values_) best = std::max(best, Rational(abs(v)));
  return best;
}

Rational StepFunction::l2_squared() const {
  Rational sum = 0;
  for (const auto& v : values_) sum += v * v;
  return sum / Rational(values_.size());
}

bool StepFunction::operator==(const StepFunction& other) const {
  if (resolution_ == other.resolution_) return values_ == other.values_;
  const int n = std::max(resolution_, other.resolution_);
  return refine(n).values_ == other.refine(n).values_;
}

StepFunction cond_expect(const StepFunction& f, int m) {
  if (m < 0 || m > f.resolution()) {
    throw InvalidInput("conditioning resolution must lie in [0, resolution(f)]");
  }
  const int d = f.resolution() - m;
  const std::size_t width = std::size_t{1} << d;
  std::vector<Rational> out(std::size_t{1} << m);
  for (std::size_t j = 0; j < out.size(); ++j) {
    Rational sum = 0;
    for (std::size_t k = 0; k < width; ++k) sum += f[static_cast<Cell>(j * width + k)];
    out[j] = sum / Rational(width);
  }
  return StepFunction(m, std::move(out));
}

Norms norms(const StepFunction& f) { return {f.l2_squared(), f.linf()}; }

Norms distance(const StepFunction& f, const StepFunction& g) { return norms(f - g); }

StepFunction clamp(const StepFunction& f, const Rational& bound) {
  if (bound < 0) throw InvalidInput("clamp bound must be non-negative");
  std::vector<Rational> out(f.values());
  const Rational lower = -bound;
  for (auto& v : out) v = std::clamp(v, lower, bound);
  return StepFunction(f.resolution(), std::move(out));
}

}  // namespace dyadic
