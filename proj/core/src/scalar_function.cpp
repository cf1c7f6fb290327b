#include "finsler/scalar_function.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "finsler/errors.hpp"

namespace finsler {

double Domain::margin(std::span<const double> x) const {
  if (!bounded()) return std::numeric_limits<double>::infinity();
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return ball_radius - std::sqrt(r2);
}

namespace {

class Squared final : public ScalarFunction {
 public:
  explicit Squared(std::shared_ptr<const ScalarFunction> f) : f_(std::move(f)) {}
  int dimension() const override { return f_->dimension(); }
  Domain domain() const override { return f_->domain(); }
  double evaluate(std::span<const double> x, std::span<const double> y) const override {
    const double v = f_->evaluate(x, y);
    return v * v;
  }
  Jet evaluate(std::span<const Jet> x, std::span<const Jet> y) const override {
    const Jet v = f_->evaluate(x, y);
    return v * v;
  }

 private:
  std::shared_ptr<const ScalarFunction> f_;
};

}  // namespace

std::shared_ptr<const ScalarFunction> squared(std::shared_ptr<const ScalarFunction> f) {
  return std::make_shared<Squared>(std::move(f));
}

void check_point(int dimension, const Domain& domain, std::span<const double> x,
                 std::span<const double> y) {
  if (static_cast<int>(x.size()) != dimension || static_cast<int>(y.size()) != dimension) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + "/" +
                                std::to_string(y.size()) + ", expected " +
                                std::to_string(dimension));
  }
  bool zero = true;
  for (double v : y) zero = zero && v == 0.0;
  if (zero) throw SlitViolation("y = 0 is outside the slit tangent bundle");
  if (!domain.contains(x)) throw DomainError("x lies outside the chart domain");
}

void seed_coordinates(std::span<const double> x, std::span<const double> y, int order,
                      std::vector<Jet>& xs, std::vector<Jet>& ys) {
  const int n = static_cast<int>(x.size());
  const JetLayout& layout = JetLayout::get(2 * n);
  xs.clear();
  ys.clear();
  for (int i = 0; i < n; ++i) xs.push_back(Jet::variable(layout, order, x_var(i), x[i]));
  for (int i = 0; i < n; ++i) ys.push_back(Jet::variable(layout, order, y_var(n, i), y[i]));
}

Jet jet_eval(const ScalarFunction& f, std::span<const double> x, std::span<const double> y,
             int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw UnsupportedOrder("jet_eval: order " + std::to_string(order) + " outside [0, " +
                           std::to_string(kMaxJetOrder) + "]");
  }
  check_point(f.dimension(), f.domain(), x, y);
  std::vector<Jet> xs, ys;
  seed_coordinates(x, y, order, xs, ys);
  return f.evaluate(xs, ys);
}

}  // namespace finsler
