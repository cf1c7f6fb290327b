#include "finsler/indicatrix.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "finsler/errors.hpp"

namespace finsler {

IndicatrixPoint indicatrix_point(const MetricSpec& spec, std::span<const double> x, double theta) {
  if (spec.dimension != 2) throw PreconditionError("indicatrix: surfaces only");
  const Point u = {std::cos(theta), std::sin(theta)};
  double r = 1.0 / finsler_norm(spec, x, u);

  Point y(2);
  Jet F;
  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    y = {r * u[0], r * u[1]};
    F = finsler_value(spec, x, y, 1);
    const double residual = F.value() - 1.0;
    if (std::abs(residual) < kIndicatrixTolerance) {
      converged = true;
      break;
    }
    const double slope = F.derivative(y_var(2, 0)).value() * u[0] +
                         F.derivative(y_var(2, 1)).value() * u[1];
    r -= residual / slope;
  }
  if (!converged) {
    throw IndicatrixSolveError("indicatrix: Newton did not converge at theta = " +
                               std::to_string(theta));
  }

  const double F1 = F.derivative(y_var(2, 0)).value();
  const double F2 = F.derivative(y_var(2, 1)).value();
  const double grad = std::hypot(F1, F2);
  IndicatrixPoint p;
  p.theta = theta;
  p.radius = r;
  p.y = y;
  p.tangent = {-F2 / grad, F1 / grad};
  // dy/dtheta = s T with s = r |F_y| / F(x, u) = r^2 |F_y|.
  p.speed = r * r * grad;
  return p;
}

IndicatrixSampling indicatrix_parametrize(const MetricSpec& spec, std::span<const double> x,
                                          int N) {
  if (spec.dimension != 2) throw PreconditionError("indicatrix: surfaces only");
  if (N < 4 || N % 2 != 0) throw PreconditionError("indicatrix: N must be even and >= 4");
  IndicatrixSampling s;
  s.x.assign(x.begin(), x.end());
  for (int a = 0; a < N; ++a) {
    const double theta = 2.0 * std::numbers::pi * a / N;
    IndicatrixPoint p = indicatrix_point(spec, x, theta);
    s.theta.push_back(theta);
    s.radius.push_back(p.radius);
    s.points.push_back(std::move(p.y));
    s.tangents.push_back(std::move(p.tangent));
    s.speed.push_back(p.speed);
  }
  return s;
}

}  // namespace finsler
