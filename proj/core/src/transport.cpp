#include "finsler/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "finsler/errors.hpp"
#include "finsler/indicatrix.hpp"
#include "finsler/linear_algebra.hpp"
#include "finsler/parallel.hpp"
#include "finsler/spray.hpp"

namespace finsler {
namespace {

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// G^i_j at (x, y).
Matrix connection(const MetricSpec& spec, std::span<const double> x, std::span<const double> y) {
  const SprayJets jets(spec, x, y, 4);
  const int n = spec.dimension;
  Matrix Gj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Gj(i, j) = jets.Gj(i, j).value();
  return Gj;
}

Point rhs(const MetricSpec& spec, const Point& c, const Point& cdot, const Point& X) {
  const Matrix Gj = connection(spec, c, X);
  const int n = spec.dimension;
  Point out(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] -= Gj(i, j) * cdot[j];
  return out;
}

Point axpy(const Point& x, double a, const Point& d) {
  Point r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * d[i];
  return r;
}

}  // namespace

ChartCurve ChartCurve::polyline(std::vector<Point> vertices) {
  if (vertices.size() < 2) throw std::invalid_argument("polyline: need at least two vertices");
  ChartCurve c;
  for (std::size_t v = 0; v + 1 < vertices.size(); ++v) {
    if (vertices[v].size() != vertices[0].size() || vertices[v + 1].size() != vertices[0].size()) {
      throw std::invalid_argument("polyline: vertices have mixed dimensions");
    }
    Segment s;
    s.kind = Segment::Kind::line;
    s.from = vertices[v];
    s.to = vertices[v + 1];
    c.segments_.push_back(std::move(s));
  }
  return c;
}

ChartCurve ChartCurve::circle(Point center, double radius, double start_angle) {
  if (center.size() < 2) throw std::invalid_argument("circle: needs at least two coordinates");
  if (!(radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
  ChartCurve c;
  Segment s;
  s.kind = Segment::Kind::arc;
  s.center = std::move(center);
  s.radius = radius;
  s.angle_from = start_angle;
  s.angle_to = start_angle + 2.0 * std::numbers::pi;
  c.segments_.push_back(std::move(s));
  return c;
}

ChartCurve ChartCurve::rectangle(Point corner, Point side_a, Point side_b) {
  if (corner.size() != side_a.size() || corner.size() != side_b.size()) {
    throw std::invalid_argument("rectangle: mixed dimensions");
  }
  Point p1 = corner, p2 = corner, p3 = corner;
  for (std::size_t i = 0; i < corner.size(); ++i) {
    p1[i] += side_a[i];
    p2[i] += side_a[i] + side_b[i];
    p3[i] += side_b[i];
  }
  return polyline({corner, p1, p2, p3, corner});
}

ChartCurve ChartCurve::concatenate(const ChartCurve& first, const ChartCurve& second) {
  if (distance(first.end(), second.start()) > 1e-12) {
    throw std::invalid_argument("concatenate: curves do not meet");
  }
  ChartCurve c = first;
  c.segments_.insert(c.segments_.end(), second.segments_.begin(), second.segments_.end());
  return c;
}

ChartCurve ChartCurve::reversed() const {
  ChartCurve c;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    Segment s = *it;
    std::swap(s.from, s.to);
    std::swap(s.angle_from, s.angle_to);
    c.segments_.push_back(std::move(s));
  }
  return c;
}

Point ChartCurve::segment_position(std::size_t index, double u) const {
  const Segment& s = segments_.at(index);
  if (s.kind == Segment::Kind::line) {
    Point p = s.from;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += u * (s.to[i] - s.from[i]);
    return p;
  }
  const double a = s.angle_from + u * (s.angle_to - s.angle_from);
  Point p = s.center;
  p[0] += s.radius * std::cos(a);
  p[1] += s.radius * std::sin(a);
  return p;
}

Point ChartCurve::segment_velocity(std::size_t index, double u) const {
  const Segment& s = segments_.at(index);
  if (s.kind == Segment::Kind::line) {
    Point v(s.from.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.to[i] - s.from[i];
    return v;
  }
  const double span = s.angle_to - s.angle_from;
  const double a = s.angle_from + u * span;
  Point v(s.center.size(), 0.0);
  v[0] = -s.radius * std::sin(a) * span;
  v[1] = s.radius * std::cos(a) * span;
  return v;
}

Point ChartCurve::start() const { return segment_position(0, 0.0); }
Point ChartCurve::end() const { return segment_position(segments_.size() - 1, 1.0); }
bool ChartCurve::closed(double tolerance) const { return distance(start(), end()) <= tolerance; }

double ChartCurve::length() const {
  double total = 0.0;
  for (const Segment& s : segments_) {
    total += s.kind == Segment::Kind::line ? distance(s.from, s.to)
                                           : s.radius * std::abs(s.angle_to - s.angle_from);
  }
  return total;
}

TransportResult transport_along(const MetricSpec& spec, const ChartCurve& curve,
                                std::span<const double> y0, double step,
                                const TransportOptions& options) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("transport: step must be in (0, 1]");
  if (curve.dimension() != spec.dimension || static_cast<int>(y0.size()) != spec.dimension) {
    throw std::invalid_argument("transport: dimension mismatch");
  }
  const Point start = curve.start();
  TransportResult result;
  result.f_initial = finsler_norm(spec, start, y0);

  const std::size_t segments = curve.segments().size();
  const int per_segment =
      std::max(1, static_cast<int>(std::ceil(1.0 / (static_cast<double>(segments) * step) - 1e-9)));
  const double h = 1.0 / per_segment;

  Point X(y0.begin(), y0.end());
  for (std::size_t s = 0; s < segments; ++s) {
    for (int k = 0; k < per_segment; ++k) {
      const double u = k * h;
      const Point c1 = curve.segment_position(s, u);
      const Point c2 = curve.segment_position(s, u + 0.5 * h);
      const Point c4 = curve.segment_position(s, u + h);
      const Point v1 = curve.segment_velocity(s, u);
      const Point v2 = curve.segment_velocity(s, u + 0.5 * h);
      const Point v4 = curve.segment_velocity(s, u + h);

      const Point k1 = rhs(spec, c1, v1, X);
      const Point k2 = rhs(spec, c2, v2, axpy(X, 0.5 * h, k1));
      const Point k3 = rhs(spec, c2, v2, axpy(X, 0.5 * h, k2));
      const Point k4 = rhs(spec, c4, v4, axpy(X, h, k3));
      for (std::size_t i = 0; i < X.size(); ++i) {
        X[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      ++result.steps;
      const double drift = std::abs(finsler_norm(spec, c4, X) - result.f_initial);
      result.f_drift = std::max(result.f_drift, drift);
      if (result.f_drift > kMaxTransportDrift) {
        throw IntegrationUnstable("transport: F drifted by " + std::to_string(result.f_drift));
      }
    }
  }
  if (options.project_to_indicatrix) {
    const double scale = result.f_initial / finsler_norm(spec, curve.end(), X);
    for (double& c : X) c *= scale;
  }
  result.y_final = std::move(X);
  return result;
}

HolonomyTable loop_holonomy(const MetricSpec& spec, const ChartCurve& loop, int N, double step,
                            int workers, const TransportOptions& options) {
  if (!loop.closed()) throw PreconditionError("loop_holonomy: curve is not closed");
  HolonomyTable table;
  table.base = loop.start();
  const IndicatrixSampling sampling = indicatrix_parametrize(spec, table.base, N);

  std::vector<TransportResult> results(N);
  parallel_for(N, workers, [&](std::size_t a) {
    results[a] = transport_along(spec, loop, sampling.points[a], step, options);
  });

  const double two_pi = 2.0 * std::numbers::pi;
  double previous = 0.0;
  for (int a = 0; a < N; ++a) {
    const Point& out = results[a].y_final;
    table.theta_in.push_back(sampling.theta[a]);
    table.y_in.push_back(sampling.points[a]);
    table.y_out.push_back(out);
    table.max_f_drift = std::max(table.max_f_drift, results[a].f_drift);
    table.max_indicatrix_error =
        std::max(table.max_indicatrix_error, std::abs(finsler_norm(spec, table.base, out) - 1.0));
    table.identity_deviation = std::max(table.identity_deviation, distance(out, sampling.points[a]));

    double theta = std::atan2(out[1], out[0]);
    const double reference = a == 0 ? sampling.theta[0] : previous;
    theta += two_pi * std::round((reference - theta) / two_pi);
    table.theta_out.push_back(theta);
    previous = theta;
  }

  // Derivative of the circle map by periodic central differences.
  table.monotone = true;
  table.derivative_min = std::numeric_limits<double>::infinity();
  table.derivative_max = -std::numeric_limits<double>::infinity();
  const double dtheta = two_pi / N;
  for (int a = 0; a < N; ++a) {
    const double next = a + 1 < N ? table.theta_out[a + 1] : table.theta_out[0] + two_pi;
    const double prev = a > 0 ? table.theta_out[a - 1] : table.theta_out[N - 1] - two_pi;
    if (next - table.theta_out[a] <= 0.0) table.monotone = false;
    const double d = (next - prev) / (2.0 * dtheta);
    table.derivative_min = std::min(table.derivative_min, d);
    table.derivative_max = std::max(table.derivative_max, d);
  }

  Matrix in(N, 2), out(N, 2);
  for (int a = 0; a < N; ++a) {
    in(a, 0) = table.y_in[a][0];
    in(a, 1) = table.y_in[a][1];
    out(a, 0) = table.y_out[a][0];
    out(a, 1) = table.y_out[a][1];
  }
  const Matrix A = in.completeOrthogonalDecomposition().solve(out);
  const Matrix fitted = in * A;
  for (int a = 0; a < N; ++a) {
    table.linear_fit_residual = std::max(
        table.linear_fit_residual, (fitted.row(a) - out.row(a)).norm() / out.row(a).norm());
  }
  return table;
}

LoopCurvatureFit curvature_from_loops(const MetricSpec& spec, std::span<const double> x,
                                      std::span<const double> X, std::span<const double> Y,
                                      std::span<const double> y,
                                      const std::vector<double>& epsilons, double step) {
  const int n = spec.dimension;
  if (epsilons.size() < 2) throw std::invalid_argument("curvature_from_loops: need >= 2 epsilons");
  LoopCurvatureFit fit;
  fit.y.assign(y.begin(), y.end());
  fit.epsilons = epsilons;

  const Tensor3 R = riemann_curvature(spec, x, y).R;
  fit.reference.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) fit.reference[i] += R(i, j, k) * X[j] * Y[k];

  const Point corner(x.begin(), x.end());
  for (double eps : epsilons) {
    Point a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = eps * X[i];
      b[i] = eps * Y[i];
    }
    const TransportResult r = transport_along(spec, ChartCurve::rectangle(corner, a, b), y, step);
    Point estimate(n);
    double err2 = 0.0;
    for (int i = 0; i < n; ++i) {
      estimate[i] = (r.y_final[i] - y[i]) / (eps * eps);
      err2 += std::pow(estimate[i] - fit.reference[i], 2);
    }
    fit.estimates.push_back(std::move(estimate));
    fit.errors.push_back(std::sqrt(err2));
  }

  // Flat metrics: tau(y) - y is integration noise and carries no order.
  double y_norm = 0.0, worst = 0.0;
  for (double v : y) y_norm += v * v;
  for (std::size_t s = 0; s < epsilons.size(); ++s) {
    worst = std::max(worst, fit.errors[s] * epsilons[s] * epsilons[s]);
  }
  if (worst <= 1e-9 * (1.0 + std::sqrt(y_norm))) {
    fit.exact = true;
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }

  const std::size_t m = epsilons.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    mx += std::log(epsilons[s]);
    my += std::log(fit.errors[s]);
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double dx = std::log(epsilons[s]) - mx;
    sxy += dx * (std::log(fit.errors[s]) - my);
    sxx += dx * dx;
  }
  fit.slope = sxy / sxx;
  if (!(fit.slope >= 0.8 && fit.slope <= 1.3)) {
    throw ConsistencyFailure("curvature_from_loops: error order " + std::to_string(fit.slope) +
                             " outside [0.8, 1.3]");
  }
  return fit;
}

}  // namespace finsler
