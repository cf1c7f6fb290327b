#pragma once

#include <span>
#include <string>
#include <vector>

#include "finsler/metric_catalog.hpp"

namespace finsler {

// Piecewise-smooth curve in a chart. Each segment is parametrised by
// u in [0, 1]; the whole curve is their concatenation.
class ChartCurve {
 public:
  struct Segment {
    enum class Kind { line, arc };
    Kind kind = Kind::line;
    Point from, to;       // line
    Point center;         // arc, in the (x^1, x^2) plane
    double radius = 0.0;
    double angle_from = 0.0;
    double angle_to = 0.0;
  };

  static ChartCurve polyline(std::vector<Point> vertices);
  // Full counterclockwise circle starting at center + radius (cos a, sin a).
  static ChartCurve circle(Point center, double radius, double start_angle = 0.0);
  // corner -> corner + a -> corner + a + b -> corner + b -> corner.
  static ChartCurve rectangle(Point corner, Point side_a, Point side_b);
  static ChartCurve concatenate(const ChartCurve& first, const ChartCurve& second);

  ChartCurve reversed() const;

  int dimension() const { return static_cast<int>(start().size()); }
  const std::vector<Segment>& segments() const { return segments_; }
  Point segment_position(std::size_t s, double u) const;
  Point segment_velocity(std::size_t s, double u) const;

  Point start() const;
  Point end() const;
  bool closed(double tolerance = 1e-12) const;
  double length() const;

 private:
  std::vector<Segment> segments_;
};

struct TransportOptions {
  // Rescale the final vector onto the starting level set of F. Off by
  // default: drift is reported, not hidden.
  bool project_to_indicatrix = false;
};

struct TransportResult {
  Point y_final;
  double f_initial = 0.0;
  double f_drift = 0.0;  // max over steps of |F(c(t), X(t)) - F(c(0), X(0))|
  int steps = 0;
};

inline constexpr double kMaxTransportDrift = 1e-4;

// Parallel transport dX^i/dt = -G^i_j(c, X) dc^j/dt by classical RK4 with a
// fixed parameter step. Each segment gets ceil((1/segments)/step) steps.
// Throws DomainError if any stage leaves the chart and IntegrationUnstable if
// the drift exceeds kMaxTransportDrift.
TransportResult transport_along(const MetricSpec& spec, const ChartCurve& curve,
                                std::span<const double> y0, double step,
                                const TransportOptions& options = {});

// Holonomy of a closed loop on the indicatrix circle at its base point.
struct HolonomyTable {
  Point base;
  std::vector<double> theta_in;
  std::vector<double> theta_out;  // unwrapped, continuous in theta_in
  std::vector<Point> y_in;
  std::vector<Point> y_out;
  double max_indicatrix_error = 0.0;  // max |F(base, tau(y)) - 1|
  double max_f_drift = 0.0;
  double identity_deviation = 0.0;    // max |tau(y) - y|
  double linear_fit_residual = 0.0;   // max |A y - tau(y)| / |tau(y)| for the best linear A
  double derivative_min = 0.0;        // of d theta_out / d theta_in
  double derivative_max = 0.0;
  bool monotone = false;
};

// Requires a closed surface loop and even N >= 4.
HolonomyTable loop_holonomy(const MetricSpec& spec, const ChartCurve& loop, int N, double step,
                            int workers = 1, const TransportOptions& options = {});

// Curvature recovered from small rectangular loops.
struct LoopCurvatureFit {
  Point y;
  Point reference;                        // R(X, Y)(x, y)
  std::vector<double> epsilons;
  std::vector<Point> estimates;           // (tau(y) - y) / eps^2
  std::vector<double> errors;             // |estimate - reference|
  double slope = 0.0;                     // log-log slope of error vs eps
  bool exact = false;                     // tau(y) - y - eps^2 R(X, Y) y below 1e-9 (1 + |y|)
};

// Loop orientation: x -> x + eps X -> x + eps (X + Y) -> x + eps Y -> x, which
// makes the estimates converge to +R(X, Y) y. Throws ConsistencyFailure when
// the slope leaves [0.8, 1.3].
LoopCurvatureFit curvature_from_loops(const MetricSpec& spec, std::span<const double> x,
                                      std::span<const double> X, std::span<const double> Y,
                                      std::span<const double> y,
                                      const std::vector<double>& epsilons, double step = 1e-3);

}  // namespace finsler
