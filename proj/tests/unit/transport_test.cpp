#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/transport.hpp"
#include "klein_oracle.hpp"

namespace finsler {
namespace {

using V = std::vector<double>;

TEST(ChartCurve, Builders) {
  const ChartCurve r = ChartCurve::rectangle({0.1, 0.1}, {0.2, 0.0}, {0.0, 0.3});
  EXPECT_EQ(r.segments().size(), 4u);
  EXPECT_TRUE(r.closed());
  EXPECT_NEAR(r.length(), 1.0, 1e-15);
  const ChartCurve c = ChartCurve::circle({0.0, 0.0}, 0.5);
  EXPECT_TRUE(c.closed());
  EXPECT_NEAR(c.length(), std::numbers::pi, 1e-14);
  const Point mid = c.segment_position(0, 0.25);
  EXPECT_NEAR(mid[0], 0.0, 1e-15);
  EXPECT_NEAR(mid[1], 0.5, 1e-15);

  const ChartCurve p = ChartCurve::polyline({{0.0, 0.0}, {0.1, 0.0}});
  const ChartCurve q = ChartCurve::polyline({{0.1, 0.0}, {0.1, 0.2}});
  const ChartCurve pq = ChartCurve::concatenate(p, q);
  EXPECT_EQ(pq.segments().size(), 2u);
  EXPECT_EQ(pq.reversed().start(), pq.end());
  EXPECT_THROW(ChartCurve::concatenate(q, q), std::invalid_argument);
  EXPECT_THROW(ChartCurve::polyline({{0.0, 0.0}}), std::invalid_argument);
}

TEST(Transport, EuclideanIsIdentity) {
  const MetricSpec spec = make_euclidean();
  const TransportResult r = transport_along(spec, ChartCurve::circle({0.3, 0.0}, 2.0), V{0.6, -0.8}, 1e-2);
  EXPECT_EQ(r.y_final, (V{0.6, -0.8}));
  EXPECT_EQ(r.f_drift, 0.0);
}

// Riemannian transport reduces to dX^i/du = -Gamma^i_jk(c) c'^j X^k; integrate
// that with the analytic Christoffel symbols and compare.
TEST(Transport, KleinMatchesChristoffelOde) {
  const MetricSpec spec = make_klein();
  const ChartCurve curve = ChartCurve::polyline({{0.1, -0.2}, {0.4, 0.1}, {-0.1, 0.3}});
  const V y0 = {0.5, 0.9};
  const double step = 1e-3;
  const TransportResult r = transport_along(spec, curve, y0, step);

  V X = y0;
  const int per_segment = static_cast<int>(std::ceil(0.5 / step - 1e-9));
  const double h = 1.0 / per_segment;
  for (std::size_t s = 0; s < curve.segments().size(); ++s) {
    auto rhs = [&](double u, const V& Y) {
      const Point c = curve.segment_position(s, u), v = curve.segment_velocity(s, u);
      const auto G = klein_oracle::christoffel(c);
      V out(2, 0.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) out[i] -= G(i, j, k) * v[j] * Y[k];
      return out;
    };
    auto add = [](const V& a, double t, const V& b) { return V{a[0] + t * b[0], a[1] + t * b[1]}; };
    for (int k = 0; k < per_segment; ++k) {
      const double u = k * h;
      const V k1 = rhs(u, X), k2 = rhs(u + h / 2, add(X, h / 2, k1));
      const V k3 = rhs(u + h / 2, add(X, h / 2, k2)), k4 = rhs(u + h, add(X, h, k3));
      for (int i = 0; i < 2; ++i) X[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
  }
  EXPECT_NEAR(r.y_final[0], X[0], 1e-10);
  EXPECT_NEAR(r.y_final[1], X[1], 1e-10);
}

TEST(Transport, PreservesFinslerNormAndReverses) {
  const ChartCurve loop = ChartCurve::rectangle({0.1, 0.1}, {0.2, 0.0}, {0.0, 0.2});
  for (const std::string& id : builtin_ids()) {
    const MetricSpec spec = make_builtin(id);
    const V y0 = {0.6, -0.5};
    const TransportResult r = transport_along(spec, loop, y0, 1e-3);
    EXPECT_LT(r.f_drift / loop.length(), 1e-8) << id;
    const TransportResult back = transport_along(spec, loop.reversed(), r.y_final, 1e-3);
    EXPECT_NEAR(back.y_final[0], y0[0], 1e-8) << id;
    EXPECT_NEAR(back.y_final[1], y0[1], 1e-8) << id;
  }
}

TEST(Transport, Errors) {
  const MetricSpec funk = make_funk();
  const ChartCurve out = ChartCurve::polyline({{0.5, 0.0}, {1.5, 0.0}});
  EXPECT_THROW(transport_along(funk, out, V{1.0, 0.0}, 1e-2), DomainError);
  const ChartCurve ok = ChartCurve::polyline({{0.0, 0.0}, {0.1, 0.0}});
  EXPECT_THROW(transport_along(funk, ok, V{1.0, 0.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(transport_along(funk, ok, V{1.0, 0.0, 0.0}, 1e-2), std::invalid_argument);
  EXPECT_THROW(transport_along(funk, ok, V{0.0, 0.0}, 1e-2), SlitViolation);
  // Too coarse a step across a long path near the boundary drifts.
  const ChartCurve rough = ChartCurve::circle({0.0, 0.0}, 0.95);
  EXPECT_THROW(transport_along(funk, rough, V{0.0, 1.0}, 0.5), IntegrationUnstable);
}

TEST(Holonomy, TablesByMetric) {
  const ChartCurve loop = ChartCurve::rectangle({0.1, 0.1}, {0.2, 0.0}, {0.0, 0.2});
  const HolonomyTable e = loop_holonomy(make_euclidean(), loop, 16, 1e-2);
  EXPECT_EQ(e.identity_deviation, 0.0);
  const HolonomyTable b = loop_holonomy(make_berwald_flat(), loop, 16, 1e-3);
  EXPECT_LT(b.identity_deviation, 1e-7);

  const HolonomyTable f = loop_holonomy(make_funk(), loop, 16, 1e-2);
  EXPECT_TRUE(f.monotone);
  EXPECT_GT(f.derivative_min, 0.0);
  EXPECT_GT(f.identity_deviation, 1e-3);
  EXPECT_LT(f.max_indicatrix_error, 1e-8);
  // Finsler holonomy is not linear; Riemannian holonomy is.
  EXPECT_GT(f.linear_fit_residual, 1e-4);
  const HolonomyTable k = loop_holonomy(make_klein(), loop, 16, 1e-2);
  EXPECT_LT(k.linear_fit_residual, 1e-10);
  for (std::size_t a = 1; a < f.theta_out.size(); ++a) EXPECT_GT(f.theta_out[a], f.theta_out[a - 1]);

  EXPECT_THROW(loop_holonomy(make_funk(), ChartCurve::polyline({{0.0, 0.0}, {0.1, 0.0}}), 16, 1e-2),
               PreconditionError);
}

TEST(Holonomy, WorkerCountDoesNotChangeResults) {
  const ChartCurve loop = ChartCurve::circle({0.1, 0.0}, 0.15);
  const HolonomyTable a = loop_holonomy(make_funk(), loop, 8, 1e-2, 1);
  const HolonomyTable b = loop_holonomy(make_funk(), loop, 8, 1e-2, 3);
  EXPECT_EQ(a.theta_out, b.theta_out);
  EXPECT_EQ(a.y_out, b.y_out);
}

TEST(CurvatureFromLoops, ConvergesToCurvature) {
  const std::vector<double> eps = {0.04, 0.02, 0.01, 0.005};
  for (const char* id : {"funk", "klein"}) {
    const LoopCurvatureFit fit =
        curvature_from_loops(make_builtin(id), V{0.2, -0.1}, V{1.0, 0.0}, V{0.0, 1.0}, V{0.5, 0.7}, eps);
    EXPECT_FALSE(fit.exact);
    EXPECT_GE(fit.slope, 0.8) << id;
    EXPECT_LE(fit.slope, 1.3) << id;
    EXPECT_LT(fit.errors.back(), 0.01 * std::hypot(fit.reference[0], fit.reference[1])) << id;
  }
  const LoopCurvatureFit flat = curvature_from_loops(make_berwald_flat(), V{0.2, -0.1}, V{1.0, 0.0},
                                                     V{0.0, 1.0}, V{0.5, 0.7}, eps);
  EXPECT_TRUE(flat.exact);
}

}  // namespace
}  // namespace finsler
