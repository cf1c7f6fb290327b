#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/holonomy_algebra.hpp"
#include "finsler/spectral.hpp"
#include "finsler/spray.hpp"

namespace finsler {
namespace {

using V = std::vector<double>;
const V e1 = {1.0, 0.0}, e2 = {0.0, 1.0};

TEST(VerticalField, CurvatureFieldExamples) {
  const MetricSpec funk = make_funk();
  const VerticalField xi = curvature_field(funk, e1, e2);
  EXPECT_EQ(xi.depth(), 0);
  EXPECT_EQ(xi.describe(), "R(e1,e2)");
  for (const auto& s : sample_tangents(2, 20, kDefaultSeed)) {
    FieldEvaluator ev(funk, s.x, s.y, 0);
    const Vector v = ev.values(xi);
    const Matrix g = fundamental_tensor(funk, s.x, s.y);
    const double gy1 = g(0, 0) * s.y[0] + g(0, 1) * s.y[1];
    const double gy2 = g(1, 0) * s.y[0] + g(1, 1) * s.y[1];
    // lambda (d^i_2 g_1m y^m - d^i_1 g_2m y^m)
    EXPECT_NEAR(v(0), -0.25 * -gy2, 1e-8 * (1 + std::abs(gy2)));
    EXPECT_NEAR(v(1), -0.25 * gy1, 1e-8 * (1 + std::abs(gy1)));
    EXPECT_LT(ev.tangency_defect(xi), 1e-10);

    FieldEvaluator flat(make_berwald_flat(), s.x, s.y, 0);
    EXPECT_LT(flat.values(curvature_field(make_berwald_flat(), e1, e2)).norm(), 1e-8);
  }
  FieldEvaluator euc(make_euclidean(), V{0.3, 0.1}, V{1.0, 0.0}, 1);
  const VerticalField xe = curvature_field(make_euclidean(), e1, e2);
  EXPECT_EQ(euc.values(xe).norm(), 0.0);
  EXPECT_EQ(euc.values(covariant_derivative(xe, 0)).norm(), 0.0);
  EXPECT_THROW(curvature_field(funk, V{1.0, 0.0, 0.0}, e2), std::invalid_argument);
}

TEST(VerticalField, DepthLimit) {
  VerticalField f = VerticalField::curvature(e1, e2);
  for (int d = 0; d < kMaxFieldDepth; ++d) f = covariant_derivative(f, 0);
  EXPECT_EQ(f.depth(), kMaxFieldDepth);
  EXPECT_THROW(covariant_derivative(f, 1), UnsupportedOrder);
  EXPECT_THROW(vertical_bracket(f, VerticalField::curvature(e1, e2)), UnsupportedOrder);
  FieldEvaluator ev(make_funk(), V{0.1, 0.2}, V{1.0, 0.3}, 1);
  EXPECT_THROW(ev.values(covariant_derivative(covariant_derivative(VerticalField::curvature(e1, e2), 0), 1)),
               UnsupportedOrder);
}

class FunkFields : public ::testing::Test {
 protected:
  MetricSpec funk = make_funk();
  VerticalField xi = curvature_field(funk, e1, e2);
  VerticalField d1 = covariant_derivative(xi, 0);
  VerticalField d2 = covariant_derivative(xi, 1);
};

TEST_F(FunkFields, BracketAntisymmetry) {
  for (const auto& s : sample_tangents(2, 20, kDefaultSeed + 1)) {
    FieldEvaluator ev(funk, s.x, s.y, 2);
    EXPECT_EQ(ev.values(vertical_bracket(xi, xi)).norm(), 0.0);
    const Vector a = ev.values(vertical_bracket(d1, xi));
    const Vector b = ev.values(vertical_bracket(xi, d1));
    EXPECT_LT((a + b).norm(), 1e-14 * (1.0 + a.norm()));
  }
}

TEST_F(FunkFields, JacobiIdentity) {
  for (const auto& s : sample_tangents(2, 20, kDefaultSeed + 2)) {
    FieldEvaluator ev(funk, s.x, s.y, 3);
    const Vector j = ev.values(vertical_bracket(vertical_bracket(xi, d1), d2)) +
                     ev.values(vertical_bracket(vertical_bracket(d1, d2), xi)) +
                     ev.values(vertical_bracket(vertical_bracket(d2, xi), d1));
    EXPECT_LT(j.norm(), 1e-7);
  }
}

TEST_F(FunkFields, TangencyOfDerivedFields) {
  for (const auto& s : sample_tangents(2, 10, kDefaultSeed + 3)) {
    FieldEvaluator ev(funk, s.x, s.y, 3);
    for (const VerticalField& f : {d1, d2, vertical_bracket(d1, xi), covariant_derivative(d2, 0),
                                   vertical_bracket(vertical_bracket(d1, xi), d2)}) {
      EXPECT_LT(ev.tangency_defect(f), 1e-8) << f.describe();
    }
  }
}

TEST_F(FunkFields, BracketMatchesSpectralFormula) {
  const IndicatrixSampling s = indicatrix_parametrize(funk, V{0.3, 0.1}, 64);
  EXPECT_LT(bracket_consistency_residual(funk, d1, xi, s), 1e-6);
  EXPECT_LT(bracket_consistency_residual(funk, d2, d1, s), 1e-6);
}

TEST_F(FunkFields, RestrictedCoefficientSpectralVsCentralDifferences) {
  const V x = {0.3, 0.0};
  const int N = 64;
  const IndicatrixSampling s = indicatrix_parametrize(funk, x, N);
  const V c = restrict_to_indicatrix(funk, xi, s);
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  EXPECT_GT(*hi - *lo, 1e-3);  // not constant

  const V d = spectral_derivative(c);
  const double h = 1e-5;
  for (int a = 0; a < N; a += 5) {
    auto coef = [&](double theta) {
      const IndicatrixPoint p = indicatrix_point(funk, x, theta);
      FieldEvaluator ev(funk, x, p.y, 0);
      const Vector v = ev.values(xi);
      return v(0) * p.tangent[0] + v(1) * p.tangent[1];
    };
    const double fd = (coef(s.theta[a] + h) - coef(s.theta[a] - h)) / (2 * h);
    EXPECT_NEAR(d[a], fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(Restriction, ZeroAndRotationFields) {
  const IndicatrixSampling s = indicatrix_parametrize(make_euclidean(), V{0.3, 0.1}, 16);
  std::vector<Vector> zero(16, Vector::Zero(2)), rot(16);
  for (int a = 0; a < 16; ++a) rot[a] = (Vector(2) << -s.points[a][1], s.points[a][0]).finished();
  for (double c : restrict_values(s, zero)) EXPECT_EQ(c, 0.0);
  for (double c : restrict_values(s, rot)) EXPECT_NEAR(c, 1.0, 1e-14);
  std::vector<Vector> radial(16);
  for (int a = 0; a < 16; ++a) radial[a] = (Vector(2) << s.points[a][0], s.points[a][1]).finished();
  EXPECT_THROW(restrict_values(s, radial), TangencyError);
}

TEST(Algebra, EuclideanAndFlatAreTrivial) {
  for (const char* id : {"euclidean", "berwald_flat"}) {
    const RankReport r = generate_algebra(make_builtin(id), V{0.3, 0.1}, 3, 64, 64);
    EXPECT_EQ(r.ranks(), (std::vector<int>{0, 0, 0, 0})) << id;
    EXPECT_TRUE(r.saturated);
    EXPECT_FALSE(r.truncated);
  }
}

TEST(Algebra, KleinSaturatesAtRankOne) {
  for (const V& x : {V{0.3, 0.1}, V{-0.2, 0.25}, V{0.0, 0.0}}) {
    const RankReport r = generate_algebra(make_klein(), x, 3, 64, 64);
    EXPECT_EQ(r.ranks(), (std::vector<int>{1, 1, 1, 1}));
    EXPECT_TRUE(r.saturated);
  }
}

TEST(Algebra, FunkGrows) {
  const RankReport r = generate_algebra(make_funk(), V{0.3, 0.1}, 3, 64, 64);
  const auto ranks = r.ranks();
  ASSERT_EQ(ranks.size(), 4u);
  EXPECT_GE(ranks[2], 4);
  for (int d = 1; d < 4; ++d) EXPECT_GT(ranks[d], ranks[d - 1]);
  EXPECT_FALSE(r.saturated);
  for (const RankRound& round : r.rounds) {
    EXPECT_EQ(round.fields.size(), static_cast<std::size_t>(round.field_count));
    EXPECT_EQ(round.coefficients.size(), round.fields.size());
    EXPECT_TRUE(std::is_sorted(round.singular_values.rbegin(), round.singular_values.rend()));
  }
}

TEST(Algebra, FieldCapTruncates) {
  const RankReport r = generate_algebra(make_funk(), V{0.3, 0.1}, 3, 5, 32);
  EXPECT_TRUE(r.truncated);
  EXPECT_LE(r.rounds.back().field_count, 5);
  const auto ranks = r.ranks();
  EXPECT_TRUE(std::is_sorted(ranks.begin(), ranks.end()));
}

TEST(Algebra, Preconditions) {
  EXPECT_THROW(generate_algebra(make_funk(), V{0.3, 0.1}, 5), PreconditionError);
  EXPECT_THROW(generate_algebra(make_funk(3), V{0.3, 0.1, 0.0}, 2), PreconditionError);
}

TEST(Algebra, RankMonotoneAcrossPoints) {
  for (const char* id : {"funk", "klein"}) {
    for (const auto& s : sample_tangents(2, 4, kDefaultSeed + 8, 0.6)) {
      const auto ranks = generate_algebra(make_builtin(id), s.x, 2, 32, 32).ranks();
      EXPECT_TRUE(std::is_sorted(ranks.begin(), ranks.end())) << id;
    }
  }
}

TEST(SurfaceIdentities, Examples) {
  const SurfaceIdentityResiduals f = surface_identity_check(make_funk(), V{0.3, 0.1}, 20);
  EXPECT_LT(f.first, 1e-6);
  EXPECT_LT(f.second, 1e-6);
  EXPECT_NEAR(f.lambda, -0.25, 1e-8);
  const SurfaceIdentityResiduals k = surface_identity_check(make_klein(), V{-0.2, 0.4}, 20);
  EXPECT_LT(k.first, 1e-8);
  EXPECT_LT(k.second, 1e-8);
  const SurfaceIdentityResiduals e = surface_identity_check(make_euclidean(), V{0.1, 0.1}, 5);
  EXPECT_EQ(e.first, 0.0);
  EXPECT_EQ(e.second, 0.0);
}

TEST(Independence, Funk) {
  const DependenceTestResult r = function_independence_rank(make_funk(), V{0.3, 0.0});
  EXPECT_EQ(r.base.rank, 3);
  EXPECT_EQ(r.max_product_rank, 4);
  for (const auto& f : r.product_form) EXPECT_LE(f.rank, 4);
  EXPECT_NEAR(r.lambda, -0.25, 1e-8);
}

TEST(Independence, KleinFourthFunctionDependent) {
  const DependenceTestResult r = function_independence_rank(make_klein(), V{0.3, 0.1});
  EXPECT_LE(r.base.rank, 3);
  for (const auto& f : r.product_form) {
    EXPECT_LE(f.rank, 3);
    EXPECT_LT(f.residual, 1e-8);
    EXPECT_EQ(f.coefficients.size(), 3u);
  }
  EXPECT_LE(r.max_hessian_rank, 3);
}

TEST(Independence, EuclideanDegenerates) {
  const DependenceTestResult r = function_independence_rank(make_euclidean(), V{0.3, 0.1});
  EXPECT_EQ(r.base.rank, 1);
  for (const auto& f : r.product_form) EXPECT_EQ(f.rank, 1);
  EXPECT_FALSE(r.base.simultaneously_nonvanishing);
}

TEST(AffineFactor, Classification) {
  const AffineFactorResult k = affine_factor_test(make_klein(), V{0.3, 0.1});
  EXPECT_TRUE(k.affine);
  // P is linear in y for Klein, so (alpha, beta) = (P_y1, P_y2) at any y.
  const ProjectiveData p = projective_factor(make_klein(), V{0.3, 0.1}, V{1.0, 1.0});
  EXPECT_NEAR(k.alpha, p.P_y(0), 1e-8);
  EXPECT_NEAR(k.beta, p.P_y(1), 1e-8);
  EXPECT_LT(k.system_residual, 1e-8);
  EXPECT_EQ(k.b1, 2.0 * k.c2);
  EXPECT_EQ(k.c3, 2.0 * k.b2);

  const AffineFactorResult f = affine_factor_test(make_funk(), V{0.3, 0.1});
  EXPECT_FALSE(f.affine);
  EXPECT_GT(f.max_f2, 1e-3);

  const AffineFactorResult e = affine_factor_test(make_euclidean(), V{0.3, 0.1});
  EXPECT_TRUE(e.affine);
  EXPECT_EQ(e.alpha, 0.0);
  EXPECT_EQ(e.beta, 0.0);
}

// Whenever some four-function family has rank 4 with all functions
// simultaneously non-vanishing, generation must not saturate.
TEST(Algebra, LieThresholdJointlyOnFunk) {
  const MetricSpec funk = make_funk();
  for (const V& x : {V{0.3, 0.1}, V{-0.2, 0.25}, V{0.1, -0.4}, V{0.45, 0.2}, V{-0.35, -0.3}}) {
    const DependenceTestResult dep = function_independence_rank(funk, x);
    const bool trigger = std::any_of(dep.product_form.begin(), dep.product_form.end(), [](const auto& f) {
      return f.rank == 4 && f.simultaneously_nonvanishing;
    });
    ASSERT_TRUE(trigger);
    EXPECT_FALSE(generate_algebra(funk, x, 3, 64, 64).saturated);
  }
}

}  // namespace
}  // namespace finsler
