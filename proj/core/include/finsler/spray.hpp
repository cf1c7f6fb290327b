#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "finsler/linear_algebra.hpp"
#include "finsler/metric_catalog.hpp"

namespace finsler {

// Values of the connection at a fixed (x, y).
struct SprayData {
  Matrix g;      // g_ij
  Matrix g_inv;  // g^ij
  Vector G;      // G^i
  Matrix Gj;     // Gj(i, j) = G^i_j
  Tensor3 Gjk;   // Gjk(i, j, k) = G^i_jk, symmetric in (j, k)
};

struct ProjectiveData {
  double P = 0.0;
  Vector P_y;   // dP/dy^k
  Matrix P_yy;  // d2P/dy^j dy^k
  Matrix P_xy;  // P_xy(j, k) = d2P/dx^j dy^k
};

struct CurvatureData {
  Tensor3 R;  // R(i, j, k) = R^i_jk
  // Pointwise least-squares lambda for R = lambda (d^i_k g_jm y^m - d^i_j g_km y^m)
  // and the relative deviation from that form.
  double lambda_fit = 0.0;
  double lambda_residual = 0.0;
};

// Jets, in the 2n variables (x, y), of every connection quantity at one point.
// `order` is the jet order of F^2; each quantity loses one order per
// derivative in its definition:
//   g, g_inv: order - 2   G: order - 3   G^i_j: order - 4
//   G^i_jk, R^i_jk: order - 5   P: order - 1
// Quantities whose order would be negative are not built.
class SprayJets {
 public:
  SprayJets(const MetricSpec& spec, std::span<const double> x, std::span<const double> y,
            int order);

  int dimension() const { return n_; }
  int order() const { return order_; }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }

  const Jet& F() const { return F_; }
  const Jet& F2() const { return F2_; }
  const Jet& P() const { return P_; }
  const Jet& g(int i, int j) const { return g_[i * n_ + j]; }
  const Jet& g_inv(int i, int j) const { return g_inv_[i * n_ + j]; }
  const Jet& G(int i) const { return G_[i]; }
  const Jet& Gj(int i, int j) const { return Gj_[i * n_ + j]; }
  const Jet& Gjk(int i, int j, int k) const { return Gjk_[(i * n_ + j) * n_ + k]; }
  const Jet& R(int i, int j, int k) const { return R_[(i * n_ + j) * n_ + k]; }

  bool has_connection() const { return order_ >= 4; }
  bool has_curvature() const { return order_ >= 5; }

  // Values; require has_curvature() (spray) or order >= 2 (metric).
  Matrix g_values() const;
  SprayData spray_data() const;
  Tensor3 curvature_values() const;

 private:
  int n_;
  int order_;
  std::vector<double> x_, y_;
  Jet F_, F2_, P_;
  std::vector<Jet> g_, g_inv_, G_, Gj_, Gjk_, R_;
};

// g_ij = 1/2 d2 F^2 / dy^i dy^j. Throws MetricDegenerate when g is not
// positive definite.
Matrix fundamental_tensor(const MetricSpec& spec, std::span<const double> x,
                          std::span<const double> y);

SprayData geodesic_coefficients(const MetricSpec& spec, std::span<const double> x,
                                std::span<const double> y);

// P = (dF/dx^i) y^i / (2F) and its derivative blocks. Requires
// spec.projectively_flat (PreconditionError otherwise).
ProjectiveData projective_factor(const MetricSpec& spec, std::span<const double> x,
                                 std::span<const double> y);

// max over random samples of |G^i - P y^i| / (1 + |G|).
double projective_flatness_residual(const MetricSpec& spec, int sample_count,
                                    std::uint64_t seed = kDefaultSeed);

CurvatureData riemann_curvature(const MetricSpec& spec, std::span<const double> x,
                                std::span<const double> y);

// d^i_k g_jm y^m - d^i_j g_km y^m
Tensor3 constant_curvature_form(const Matrix& g, std::span<const double> y);

struct FlagCurvatureFit {
  double lambda = 0.0;
  double max_residual = 0.0;
  int samples = 0;
};

// Threshold above which a metric is declared not of constant flag curvature.
inline constexpr double kConstantCurvatureTolerance = 1e-4;

// Least-squares lambda over random samples; max_residual is the largest
// |R - lambda B| / (1 + |R|). Throws NotConstantCurvature above
// kConstantCurvatureTolerance.
FlagCurvatureFit flag_curvature_fit(const MetricSpec& spec, int sample_count,
                                    std::uint64_t seed = kDefaultSeed);

struct RapcsakResidual {
  double printed = 0.0;    // |P_xy - (P_y P_y + P_yy - lambda g)|
  double corrected = 0.0;  // |P_xy - (P_y P_y + P P_yy - lambda g)|
};

RapcsakResidual rapcsak_residual(const MetricSpec& spec, std::span<const double> x,
                                 std::span<const double> y, double lambda);

// Fits a symmetric Q to F^2(x, y) over random unit y; returns
// max |F^2 - y^T Q y| / F^2.
double quadratic_form_test(const MetricSpec& spec, std::span<const double> x, int sample_count,
                           std::uint64_t seed = kDefaultSeed);

// Residuals of the projectively flat relations at one point, all relative.
struct ProjectiveIdentityResiduals {
  double flatness = 0.0;           // G^i = P y^i
  double first_derivative = 0.0;   // G^i_k = P_k y^i + P d^i_k
  double second_derivative = 0.0;  // G^i_kl = P_kl y^i + P_k d^i_l + P_l d^i_k
  double hamel = 0.0;              // P^2 - (dP/dx^i) y^i = lambda F^2
  double trace = 0.0;              // G^m_km = (n + 1) P_k
};

ProjectiveIdentityResiduals projective_identity_residual(const MetricSpec& spec,
                                                         std::span<const double> x,
                                                         std::span<const double> y,
                                                         double lambda);

// Relative deviations from 2-, 1- and 0-homogeneity of G, G^i_j, G^i_jk under
// y -> t y.
struct HomogeneityLadder {
  double G = 0.0;
  double Gj = 0.0;
  double Gjk = 0.0;
};

HomogeneityLadder homogeneity_ladder(const MetricSpec& spec, std::span<const double> x,
                                     std::span<const double> y, double t = 2.0);

}  // namespace finsler
