#include <gtest/gtest.h>

#include <cmath>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "finsler/errors.hpp"
#include "finsler/metric_catalog.hpp"
#include "finsler/spray.hpp"

namespace finsler {
namespace {

using V = std::vector<double>;

TEST(Catalog, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(finsler_norm(make_euclidean(), V{0.0, 0.0}, V{3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(finsler_norm(make_klein(), V{0.0, 0.0}, V{1.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(finsler_norm(make_funk(), V{0.0, 0.0}, V{1.0, 0.0}), 1.0);
  // Funk is asymmetric away from the origin.
  EXPECT_GT(finsler_norm(make_funk(), V{0.3, 0.0}, V{1.0, 0.0}),
            finsler_norm(make_funk(), V{0.3, 0.0}, V{-1.0, 0.0}));
}

TEST(Catalog, Errors) {
  EXPECT_THROW(finsler_norm(make_funk(), V{1.2, 0.0}, V{1.0, 0.0}), DomainError);
  EXPECT_THROW(finsler_norm(make_funk(), V{0.2, 0.0}, V{0.0, 0.0}), SlitViolation);
  EXPECT_THROW(make_builtin("hyperbolic"), InvalidMetric);
  EXPECT_THROW(make_builtin("berwald_flat", 3), InvalidMetric);
  EXPECT_THROW(make_builtin("funk", 5), InvalidMetric);
}

TEST(Catalog, DomainMargins) {
  const DomainCheck k = domain_contains(make_klein(), V{0.5, 0.0});
  EXPECT_TRUE(k.inside);
  EXPECT_NEAR(k.margin, 0.5, 1e-15);
  EXPECT_FALSE(domain_contains(make_funk(), V{1.2, 0.0}).inside);
  const DomainCheck b = domain_contains(make_berwald_flat(), V{0.99, 0.0});
  EXPECT_TRUE(b.inside);
  EXPECT_NEAR(b.margin, 0.01, 1e-15);
  EXPECT_TRUE(domain_contains(make_euclidean(), V{50.0, -3.0}).inside);
}

TEST(Catalog, HomogeneityAllEntries) {
  for (const std::string& id : builtin_ids()) {
    const MetricSpec spec = make_builtin(id);
    for (const auto& s : sample_tangents(2, 100, kDefaultSeed)) {
      for (double t : {0.5, 2.0, 10.0}) EXPECT_LT(homogeneity_residual(spec, s.x, s.y, t), 1e-12) << id;
    }
  }
}

TEST(Catalog, HigherDimensions) {
  for (int n : {3, 4}) {
    for (const char* id : {"euclidean", "klein", "funk"}) {
      const MetricSpec spec = make_builtin(id, n);
      EXPECT_EQ(spec.dimension, n);
      for (const auto& s : sample_tangents(n, 20, kDefaultSeed)) {
        EXPECT_LT(homogeneity_residual(spec, s.x, s.y, 2.0), 1e-12);
      }
    }
  }
}

TEST(Catalog, FundamentalTensorPositiveDefinite) {
  for (const std::string& id : builtin_ids()) {
    const MetricSpec spec = make_builtin(id);
    for (const auto& s : sample_tangents(2, 200, kDefaultSeed + 7)) {
      const Matrix g = fundamental_tensor(spec, s.x, s.y);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues()(0), 1e-10) << id;
    }
  }
}

TEST(Catalog, QuadraticFormTest) {
  for (const auto& x : {V{0.0, 0.0}, V{0.3, 0.0}, V{-0.4, 0.5}}) {
    EXPECT_LT(quadratic_form_test(make_klein(), x, 40), 1e-10);
  }
  EXPECT_GT(quadratic_form_test(make_funk(), V{0.3, 0.0}, 40), 1e-3);
  EXPECT_GT(quadratic_form_test(make_berwald_flat(), V{0.3, 0.0}, 40), 1e-3);
  EXPECT_LT(quadratic_form_test(make_funk(), V{0.0, 0.0}, 40), 1e-10);
}

MetricSpec constant_spd() {
  MetricSpec spec;
  spec.id = "spd";
  spec.dimension = 2;
  spec.is_riemannian_nominal = true;
  spec.finsler = make_scalar_function(2, Domain::everywhere(), [](auto, auto y) {
    using std::sqrt;
    return sqrt(2.0 * y[0] * y[0] + y[0] * y[1] + 1.5 * y[1] * y[1]);
  });
  return spec;
}

TEST(Registry, BuiltinsAndLookups) {
  const MetricCatalog cat = MetricCatalog::with_builtins();
  EXPECT_EQ(cat.ids().size(), 4u);
  EXPECT_TRUE(cat.contains("funk"));
  EXPECT_EQ(cat.get("klein")->nominal_lambda, -1.0);
  EXPECT_THROW(cat.get("nope"), InvalidMetric);
}

TEST(Registry, ReRegisteredEuclideanBehavesIdentically) {
  MetricCatalog cat = MetricCatalog::with_builtins();
  MetricSpec copy = make_euclidean();
  copy.id = "flat_copy";
  cat.register_metric(copy);
  const V x = {0.2, 0.3}, y = {0.4, -1.0};
  const SprayData a = geodesic_coefficients(*cat.get("flat_copy"), x, y);
  const SprayData b = geodesic_coefficients(*cat.get("euclidean"), x, y);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(a.G, b.G);
}

TEST(Registry, ConstantSpdIsFlat) {
  MetricCatalog cat;
  cat.register_metric(constant_spd());
  const FlagCurvatureFit fit = flag_curvature_fit(*cat.get("spd"), 50);
  EXPECT_NEAR(fit.lambda, 0.0, 1e-12);
  EXPECT_LT(fit.max_residual, 1e-12);
}

TEST(Registry, RejectsBadEntries) {
  MetricCatalog cat = MetricCatalog::with_builtins();
  MetricSpec quadratic;
  quadratic.id = "not_homogeneous";
  quadratic.finsler = make_scalar_function(2, Domain::everywhere(),
                                           [](auto, auto y) { return y[0] * y[0] + y[1] * y[1]; });
  EXPECT_THROW(cat.register_metric(quadratic), InvalidMetric);
  EXPECT_THROW(cat.register_metric(make_funk()), InvalidMetric);  // duplicate id
  MetricSpec empty;
  empty.id = "empty";
  EXPECT_THROW(cat.register_metric(empty), InvalidMetric);
}

TEST(Registry, ConcurrentReads) {
  const MetricCatalog cat = MetricCatalog::with_builtins();
  std::vector<std::jthread> readers;
  std::vector<double> out(4, 0.0);
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&, t] {
      for (int i = 0; i < 200; ++i) out[t] += cat.get("funk")->dimension;
    });
  }
  readers.clear();
  for (double v : out) EXPECT_EQ(v, 400.0);
}

}  // namespace
}  // namespace finsler
