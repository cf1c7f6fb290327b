#pragma once

#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "finsler/jet.hpp"

namespace finsler {

using Point = std::vector<double>;

// Chart domain of a metric: an open ball about the origin, or all of R^n when
// the radius is infinite.
struct Domain {
  double ball_radius = std::numeric_limits<double>::infinity();

  static Domain everywhere() { return {}; }
  static Domain unit_ball() { return {1.0}; }

  bool bounded() const { return ball_radius != std::numeric_limits<double>::infinity(); }
  // Distance to the boundary; negative outside, +inf for R^n.
  double margin(std::span<const double> x) const;
  bool contains(std::span<const double> x) const { return margin(x) > 0.0; }
};

// A scalar function of (x, y) on the slit tangent bundle of a chart, evaluable
// on doubles and on jets. Implementations must be deterministic.
class ScalarFunction {
 public:
  virtual ~ScalarFunction() = default;

  virtual int dimension() const = 0;
  virtual Domain domain() const = 0;
  virtual double evaluate(std::span<const double> x, std::span<const double> y) const = 0;
  virtual Jet evaluate(std::span<const Jet> x, std::span<const Jet> y) const = 0;
};

// Wraps a generic callable `f(x, y)` (spans of double or of Jet) as a
// ScalarFunction.
template <class Fn>
class GenericScalarFunction final : public ScalarFunction {
 public:
  GenericScalarFunction(int dimension, Domain domain, Fn fn)
      : dimension_(dimension), domain_(domain), fn_(std::move(fn)) {}

  int dimension() const override { return dimension_; }
  Domain domain() const override { return domain_; }
  double evaluate(std::span<const double> x, std::span<const double> y) const override {
    return fn_(x, y);
  }
  Jet evaluate(std::span<const Jet> x, std::span<const Jet> y) const override {
    return fn_(x, y);
  }

 private:
  int dimension_;
  Domain domain_;
  Fn fn_;
};

template <class Fn>
std::shared_ptr<const ScalarFunction> make_scalar_function(int dimension, Domain domain, Fn fn) {
  return std::make_shared<GenericScalarFunction<Fn>>(dimension, domain, std::move(fn));
}

// The square of another scalar function (F -> F^2).
std::shared_ptr<const ScalarFunction> squared(std::shared_ptr<const ScalarFunction> f);

// Index conventions for the 2n jet variables: x^i is variable i, y^i is
// variable n + i.
inline int x_var(int i) { return i; }
inline int y_var(int n, int i) { return n + i; }

// Value and all partials of f up to `order` at (x, y), by jet propagation.
// Throws SlitViolation for y = 0, DomainError outside the chart and
// UnsupportedOrder for order outside [0, kMaxJetOrder].
Jet jet_eval(const ScalarFunction& f, std::span<const double> x, std::span<const double> y,
             int order);

// Seeds the coordinate jets for a point; shared by jet_eval and the geometry.
void seed_coordinates(std::span<const double> x, std::span<const double> y, int order,
                      std::vector<Jet>& xs, std::vector<Jet>& ys);

// Validates (x, y) against f's dimension, domain and the slit condition.
void check_point(int dimension, const Domain& domain, std::span<const double> x,
                 std::span<const double> y);

}  // namespace finsler
