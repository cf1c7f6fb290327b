#pragma once

#include <span>
#include <vector>

#include "finsler/metric_catalog.hpp"

namespace finsler {

// One point of the indicatrix curve F(x, y) = 1 of a surface, in polar form
// y = r(theta) (cos theta, sin theta).
struct IndicatrixPoint {
  double theta = 0.0;
  double radius = 0.0;
  Point y;
  Point tangent;       // Euclidean unit tangent, counterclockwise
  double speed = 0.0;  // |dy/dtheta|
};

// Discretisation of the indicatrix at x on the grid theta_a = 2 pi a / N.
struct IndicatrixSampling {
  Point x;
  std::vector<double> theta;
  std::vector<double> radius;
  std::vector<Point> points;
  std::vector<Point> tangents;
  std::vector<double> speed;

  int size() const { return static_cast<int>(theta.size()); }
};

inline constexpr double kIndicatrixTolerance = 1e-14;

// Newton solve of F(x, r u(theta)) = 1 from r0 = 1 / F(x, u(theta)).
// Throws IndicatrixSolveError after 50 iterations without convergence.
IndicatrixPoint indicatrix_point(const MetricSpec& spec, std::span<const double> x, double theta);

// Requires a surface and even N >= 4 (PreconditionError otherwise).
IndicatrixSampling indicatrix_parametrize(const MetricSpec& spec, std::span<const double> x,
                                          int N);

}  // namespace finsler
