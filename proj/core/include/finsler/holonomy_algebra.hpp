#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "finsler/indicatrix.hpp"
#include "finsler/linear_algebra.hpp"
#include "finsler/vertical_field.hpp"

namespace finsler {

// xi = R(X, Y), checked against the metric's dimension.
VerticalField curvature_field(const MetricSpec& spec, std::span<const double> X,
                              std::span<const double> Y);

inline constexpr double kTangencyTolerance = 1e-6;

// Coefficient of each value along the unit tangent of the indicatrix:
// values[a] = c_a T_a + normal part. Throws TangencyError when the normal
// part exceeds kTangencyTolerance * (1 + |values[a]|).
std::vector<double> restrict_values(const IndicatrixSampling& sampling,
                                    const std::vector<Vector>& values);

// Evaluates the field at every sample and restricts it.
std::vector<double> restrict_to_indicatrix(const MetricSpec& spec, const VerticalField& field,
                                           const IndicatrixSampling& sampling, int workers = 1);

// |c - (a b' - b a')| / (1 + max|c|) over the grid, where a, b, c are the
// restricted coefficients of xi, eta and [xi, eta] and ' is the arc-length
// derivative computed spectrally.
double bracket_consistency_residual(const MetricSpec& spec, const VerticalField& xi,
                                    const VerticalField& eta, const IndicatrixSampling& sampling,
                                    int workers = 1);

struct RankRound {
  int round = 0;
  int field_count = 0;
  std::vector<std::string> fields;          // descriptions, in row order
  std::vector<std::vector<double>> coefficients;  // fields x N, unnormalised
  std::vector<double> singular_values;      // of the row-normalised matrix
  int rank = 0;
};

struct RankReport {
  std::string metric;
  Point x;
  int N = 0;
  int depth_cap = 0;
  int field_cap = 0;
  std::vector<RankRound> rounds;
  bool saturated = false;  // the last two rounds have equal rank
  bool truncated = false;  // field_cap stopped generation

  std::vector<int> ranks() const;
};

inline constexpr double kRankThreshold = 1e-8;
inline constexpr double kCollinearityTolerance = 1e-10;
inline constexpr double kZeroFieldTolerance = 1e-9;

// Round 0 holds the curvature fields R(e_j, e_k), j < k. Round d + 1 adds
// nabla_k of every field new in round d and the brackets of those fields with
// all accepted fields. A candidate is dropped when its restricted coefficient
// has RMS below kZeroFieldTolerance or is collinear with an accepted one.
// Requires a surface and 0 <= depth_cap <= 4.
RankReport generate_algebra(const MetricSpec& spec, std::span<const double> x, int depth_cap = 3,
                            int field_cap = 64, int N = 64, int workers = 1);

struct SurfaceIdentityResiduals {
  double first = 0.0;   // |nabla_k xi - 3 P_k xi|
  double second = 0.0;  // |nabla_j nabla_k xi - 3 (4 P_j P_k - lambda g_jk) xi|
  double lambda = 0.0;
};

// xi = R(e1, e2) at `sample_count` random unit directions at x. Requires a
// projectively flat surface; lambda is the pointwise curvature fit.
SurfaceIdentityResiduals surface_identity_check(const MetricSpec& spec, std::span<const double> x,
                                                int sample_count,
                                                std::uint64_t seed = kDefaultSeed);

struct FunctionFamily {
  std::string label;
  int j = -1, k = -1;  // indices of the fourth function, -1 for {1, P_1, P_2}
  std::vector<double> singular_values;
  int rank = 0;
  // Last function ~ coefficients . (preceding functions), least squares.
  std::vector<double> coefficients;
  double residual = 0.0;  // rms of the fit error / (1 + rms of the function)
  bool simultaneously_nonvanishing = false;  // some sample where no function is ~0
};

struct DependenceTestResult {
  Point x;
  int N = 0;
  double lambda = 0.0;
  FunctionFamily base;                        // {1, P_1, P_2}
  std::vector<FunctionFamily> product_form;   // {1, P_1, P_2, P_j P_k - lambda/4 g_jk}
  std::vector<FunctionFamily> hessian_form;   // {1, P_1, P_2, P_jk - lambda/4 g_jk}
  int max_product_rank = 0;
  int max_hessian_rank = 0;
};

// Samples the families on the indicatrix grid of x. Requires a projectively
// flat surface.
DependenceTestResult function_independence_rank(const MetricSpec& spec, std::span<const double> x,
                                                int N = 64);

struct AffineFactorResult {
  bool affine = false;
  std::vector<double> t;
  std::vector<double> f;       // f(t) = P(x, (t, 1))
  double max_f = 0.0;
  double max_f2 = 0.0;         // max |f''| by second differences
  double alpha = 0.0, beta = 0.0;  // f ~ alpha t + beta
  // Constants of the dependence system forced by an affine profile.
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double system_residual = 0.0;
};

// Profile of P along y = (t, 1), t in [0.2, 2] on 41 points. Affine iff
// max|f''| < 1e-8 (1 + max|f|).
AffineFactorResult affine_factor_test(const MetricSpec& spec, std::span<const double> x);

}  // namespace finsler
