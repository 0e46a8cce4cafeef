#pragma once

#include <vector>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

/// A function on [0,1) constant on each cell at its resolution, with exact values.
class StepFunction {
 public:
  StepFunction() : StepFunction(0, Rational(0)) {}
  StepFunction(int resolution, const Rational& constant);
  StepFunction(int resolution, std::vector<Rational> values);

  static StepFunction indicator(const DyadicSet& set);

  int resolution() const noexcept { return resolution_; }
  const std::vector<Rational>& values() const noexcept { return values_; }
  const Rational& operator[](Cell cell) const { return values_[cell]; }

  StepFunction refine(int resolution) const;

  StepFunction operator+(const StepFunction& other) const;
  StepFunction operator-(const StepFunction& other) const;
  StepFunction scaled(const Rational& factor) const;

  /// ∫ f dμ: the mean of the cell values.
  Rational integral() const;
  Rational linf() const;
  /// ‖f‖₂², the mean of squared values.
  Rational l2_squared() const;

  bool operator==(const StepFunction& other) const;

 private:
  int resolution_;
  std::vector<Rational> values_;
};

/// Averages f over each cell of resolution m (m ≤ resolution(f)); result at resolution m.
StepFunction cond_expect(const StepFunction& f, int m);

struct Norms {
  Rational l2_squared;
  Rational linf;
};

Norms norms(const StepFunction& f);
/// Norms of f - g after refining both to a common resolution.
Norms distance(const StepFunction& f, const StepFunction& g);

/// Values clamped into [-bound, bound].
StepFunction clamp(const StepFunction& f, const Rational& bound);

}  // namespace dyadic
