#include "finsler/spray.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

// Gauss-Jordan inverse of a symmetric positive definite matrix of jets. No
// pivoting: positive definiteness of the value matrix is checked beforehand.
std::vector<Jet> invert_spd(const std::vector<Jet>& m, int n) {
  std::vector<Jet> a = m;
  std::vector<Jet> inv;
  const Jet& ref = m[0];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inv.push_back(Jet::constant(ref.layout(), ref.order(), i == j ? 1.0 : 0.0));

  for (int c = 0; c < n; ++c) {
    const Jet pivot = reciprocal(a[c * n + c]);
    for (int j = 0; j < n; ++j) {
      a[c * n + j] = a[c * n + j] * pivot;
      inv[c * n + j] = inv[c * n + j] * pivot;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet factor = a[r * n + c];
      for (int j = 0; j < n; ++j) {
        a[r * n + j] -= factor * a[c * n + j];
        inv[r * n + j] -= factor * inv[c * n + j];
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) inv[j * n + i] = inv[i * n + j];
  return inv;
}

double relative(double diff, double reference) { return diff / (1.0 + reference); }

}  // namespace

SprayJets::SprayJets(const MetricSpec& spec, std::span<const double> x,
                     std::span<const double> y, int order)
    : n_(spec.dimension), order_(order), x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  if (order < 0 || order > kMaxJetOrder) {
    throw UnsupportedOrder("spray jets: order " + std::to_string(order) + " outside [0, " +
                           std::to_string(kMaxJetOrder) + "]");
  }
  check_point(spec.dimension, spec.domain, x, y);
  const int n = n_;
  std::vector<Jet> xs, ys;
  seed_coordinates(x, y, order, xs, ys);

  F_ = spec.finsler->evaluate(xs, ys);
  if (!(F_.value() > 0.0)) throw InvalidMetric(spec.id + ": F is not positive at the point");
  F2_ = F_ * F_;

  if (order >= 1) {
    Jet directional = F_.derivative(x_var(0)) * ys[0];
    for (int i = 1; i < n; ++i) directional += F_.derivative(x_var(i)) * ys[i];
    P_ = directional / (2.0 * F_);
  }
  if (order < 2) return;

  g_.resize(n * n);
  for (int i = 0; i < n; ++i) {
    const Jet F2_i = F2_.derivative(y_var(n, i));
    for (int j = i; j < n; ++j) {
      g_[i * n + j] = 0.5 * F2_i.derivative(y_var(n, j));
      g_[j * n + i] = g_[i * n + j];
    }
  }
  Eigen::LLT<Matrix> llt(g_values());
  if (llt.info() != Eigen::Success) {
    throw MetricDegenerate(spec.id + ": fundamental tensor is not positive definite");
  }
  g_inv_ = invert_spd(g_, n);
  if (order < 3) return;

  // dg[(l * n + j) * n + k] = d g_jk / dx^l
  std::vector<Jet> dg(n * n * n);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        dg[(l * n + j) * n + k] = g(j, k).derivative(x_var(l));
        dg[(l * n + k) * n + j] = dg[(l * n + j) * n + k];
      }

  // T_l = (2 dg_jl/dx^k - dg_jk/dx^l) y^j y^k
  std::vector<Jet> T(n);
  for (int l = 0; l < n; ++l) {
    Jet outer;
    for (int j = 0; j < n; ++j) {
      Jet inner;
      for (int k = 0; k < n; ++k) {
        Jet term = 2.0 * dg[(k * n + j) * n + l] - dg[(l * n + j) * n + k];
        term = term.times_variable(y_var(n, k), y[k]);
        if (inner.empty()) inner = std::move(term);
        else inner += term;
      }
      inner = inner.times_variable(y_var(n, j), y[j]);
      if (outer.empty()) outer = std::move(inner);
      else outer += inner;
    }
    T[l] = std::move(outer);
  }
  G_.resize(n);
  for (int i = 0; i < n; ++i) {
    Jet sum = g_inv(i, 0) * T[0];
    for (int l = 1; l < n; ++l) sum += g_inv(i, l) * T[l];
    G_[i] = 0.25 * sum;
  }
  if (order < 4) return;

  Gj_.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Gj_[i * n + j] = G_[i].derivative(y_var(n, j));
  if (order < 5) return;

  Gjk_.resize(n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Gjk_[(i * n + j) * n + k] = Gj(i, j).derivative(y_var(n, k));
        Gjk_[(i * n + k) * n + j] = Gjk_[(i * n + j) * n + k];
      }

  // Every (j, k) is evaluated from the formula, so antisymmetry is a property
  // of the computation rather than something imposed on it.
  R_.resize(n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet r = Gj(i, j).derivative(x_var(k)) - Gj(i, k).derivative(x_var(j));
        Jet first = Gj(0, j) * Gjk(i, k, 0);
        Jet second = Gj(0, k) * Gjk(i, j, 0);
        for (int m = 1; m < n; ++m) {
          first += Gj(m, j) * Gjk(i, k, m);
          second += Gj(m, k) * Gjk(i, j, m);
        }
        R_[(i * n + j) * n + k] = r + (first - second);
      }
}

Matrix SprayJets::g_values() const {
  Matrix g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = g_[i * n_ + j].value();
  return g;
}

SprayData SprayJets::spray_data() const {
  if (!has_curvature()) throw UnsupportedOrder("spray data needs jets of order >= 5");
  SprayData d;
  d.g = g_values();
  d.g_inv = Matrix(n_, n_);
  d.G = Vector(n_);
  d.Gj = Matrix(n_, n_);
  d.Gjk = Tensor3(n_);
  for (int i = 0; i < n_; ++i) {
    d.G[i] = G(i).value();
    for (int j = 0; j < n_; ++j) {
      d.g_inv(i, j) = g_inv(i, j).value();
      d.Gj(i, j) = Gj(i, j).value();
      for (int k = 0; k < n_; ++k) d.Gjk(i, j, k) = Gjk(i, j, k).value();
    }
  }
  return d;
}

Tensor3 SprayJets::curvature_values() const {
  if (!has_curvature()) throw UnsupportedOrder("curvature needs jets of order >= 5");
  Tensor3 R(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) R(i, j, k) = this->R(i, j, k).value();
  return R;
}

Matrix fundamental_tensor(const MetricSpec& spec, std::span<const double> x,
                          std::span<const double> y) {
  return SprayJets(spec, x, y, 2).g_values();
}

SprayData geodesic_coefficients(const MetricSpec& spec, std::span<const double> x,
                                std::span<const double> y) {
  return SprayJets(spec, x, y, 5).spray_data();
}

namespace {

ProjectiveData projective_data(const SprayJets& jets) {
  const int n = jets.dimension();
  ProjectiveData d;
  d.P = jets.P().value();
  d.P_y = Vector(n);
  d.P_yy = Matrix(n, n);
  d.P_xy = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    const Jet P_k = jets.P().derivative(y_var(n, k));
    d.P_y[k] = P_k.value();
    for (int j = 0; j < n; ++j) {
      d.P_yy(j, k) = P_k.derivative(y_var(n, j)).value();
      d.P_xy(j, k) = P_k.derivative(x_var(j)).value();
    }
  }
  return d;
}

void require_projectively_flat(const MetricSpec& spec) {
  if (!spec.projectively_flat) {
    throw PreconditionError(spec.id + ": metric is not flagged projectively flat");
  }
}

}  // namespace

ProjectiveData projective_factor(const MetricSpec& spec, std::span<const double> x,
                                 std::span<const double> y) {
  require_projectively_flat(spec);
  return projective_data(SprayJets(spec, x, y, 3));
}

double projective_flatness_residual(const MetricSpec& spec, int sample_count,
                                    std::uint64_t seed) {
  require_projectively_flat(spec);
  double worst = 0.0;
  for (const TangentSample& s : sample_tangents(spec.dimension, sample_count, seed)) {
    const SprayJets jets(spec, s.x, s.y, 3);
    double diff2 = 0.0, norm2 = 0.0;
    for (int i = 0; i < spec.dimension; ++i) {
      const double G = jets.G(i).value();
      const double d = G - jets.P().value() * s.y[i];
      diff2 += d * d;
      norm2 += G * G;
    }
    worst = std::max(worst, relative(std::sqrt(diff2), std::sqrt(norm2)));
  }
  return worst;
}

Tensor3 constant_curvature_form(const Matrix& g, std::span<const double> y) {
  const int n = static_cast<int>(g.rows());
  Vector gy = Vector::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) gy[j] += g(j, m) * y[m];
  Tensor3 B(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        B(i, j, k) = (i == k ? gy[j] : 0.0) - (i == j ? gy[k] : 0.0);
      }
  return B;
}

namespace {

double inner(const Tensor3& a, const Tensor3& b) {
  const int n = a.dimension();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += a(i, j, k) * b(i, j, k);
  return s;
}

}  // namespace

CurvatureData riemann_curvature(const MetricSpec& spec, std::span<const double> x,
                                std::span<const double> y) {
  const SprayJets jets(spec, x, y, 5);
  CurvatureData d;
  d.R = jets.curvature_values();
  const Tensor3 B = constant_curvature_form(jets.g_values(), y);
  const double bb = inner(B, B);
  d.lambda_fit = bb > 0.0 ? inner(d.R, B) / bb : 0.0;
  d.lambda_residual = relative((d.R - d.lambda_fit * B).norm(), d.R.norm());
  return d;
}

FlagCurvatureFit flag_curvature_fit(const MetricSpec& spec, int sample_count,
                                    std::uint64_t seed) {
  std::vector<Tensor3> Rs, Bs;
  double rb = 0.0, bb = 0.0;
  for (const TangentSample& s : sample_tangents(spec.dimension, sample_count, seed)) {
    const SprayJets jets(spec, s.x, s.y, 5);
    Rs.push_back(jets.curvature_values());
    Bs.push_back(constant_curvature_form(jets.g_values(), s.y));
    rb += inner(Rs.back(), Bs.back());
    bb += inner(Bs.back(), Bs.back());
  }
  FlagCurvatureFit fit;
  fit.samples = sample_count;
  fit.lambda = bb > 0.0 ? rb / bb : 0.0;
  for (std::size_t s = 0; s < Rs.size(); ++s) {
    fit.max_residual =
        std::max(fit.max_residual, relative((Rs[s] - fit.lambda * Bs[s]).norm(), Rs[s].norm()));
  }
  if (fit.max_residual > kConstantCurvatureTolerance) {
    throw NotConstantCurvature(spec.id + ": curvature deviates from the constant form by " +
                               std::to_string(fit.max_residual));
  }
  return fit;
}

RapcsakResidual rapcsak_residual(const MetricSpec& spec, std::span<const double> x,
                                 std::span<const double> y, double lambda) {
  require_projectively_flat(spec);
  const SprayJets jets(spec, x, y, 3);
  const ProjectiveData p = projective_data(jets);
  const Matrix g = jets.g_values();
  const Matrix outer = p.P_y * p.P_y.transpose();
  RapcsakResidual r;
  r.printed = (p.P_xy - (outer + p.P_yy - lambda * g)).norm();
  r.corrected = (p.P_xy - (outer + p.P * p.P_yy - lambda * g)).norm();
  return r;
}

double quadratic_form_test(const MetricSpec& spec, std::span<const double> x, int sample_count,
                           std::uint64_t seed) {
  const int n = spec.dimension;
  const int unknowns = n * (n + 1) / 2;
  if (sample_count < unknowns) {
    throw PreconditionError("quadratic_form_test: need at least n(n+1)/2 samples");
  }
  const std::vector<Point> directions = sample_directions(n, sample_count, seed);
  Matrix A(sample_count, unknowns);
  Vector b(sample_count);
  for (int s = 0; s < sample_count; ++s) {
    const Point& u = directions[s];
    int col = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) A(s, col++) = (i == j ? 1.0 : 2.0) * u[i] * u[j];
    const double f = finsler_norm(spec, x, u);
    b[s] = f * f;
  }
  const Vector q = least_squares(A, b);
  const Vector fitted = A * q;
  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    worst = std::max(worst, std::abs(b[s] - fitted[s]) / b[s]);
  }
  return worst;
}

ProjectiveIdentityResiduals projective_identity_residual(const MetricSpec& spec,
                                                         std::span<const double> x,
                                                         std::span<const double> y,
                                                         double lambda) {
  require_projectively_flat(spec);
  const int n = spec.dimension;
  const SprayJets jets(spec, x, y, 5);
  const SprayData s = jets.spray_data();
  const ProjectiveData p = projective_data(jets);
  ProjectiveIdentityResiduals r;

  double diff2 = 0.0;
  for (int i = 0; i < n; ++i) diff2 += std::pow(s.G[i] - p.P * y[i], 2);
  r.flatness = relative(std::sqrt(diff2), s.G.norm());

  double first = 0.0, first_ref = 0.0, second = 0.0, second_ref = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double Gik = p.P_y[k] * y[i] + (i == k ? p.P : 0.0);
      first = std::max(first, std::abs(s.Gj(i, k) - Gik));
      first_ref = std::max(first_ref, std::abs(s.Gj(i, k)));
      for (int l = 0; l < n; ++l) {
        const double Gikl = p.P_yy(k, l) * y[i] + (i == l ? p.P_y[k] : 0.0) +
                            (i == k ? p.P_y[l] : 0.0);
        second = std::max(second, std::abs(s.Gjk(i, k, l) - Gikl));
        second_ref = std::max(second_ref, std::abs(s.Gjk(i, k, l)));
      }
    }
  r.first_derivative = relative(first, first_ref);
  r.second_derivative = relative(second, second_ref);

  double Px_y = 0.0;
  for (int i = 0; i < n; ++i) Px_y += jets.P().derivative(x_var(i)).value() * y[i];
  const double F2 = jets.F2().value();
  r.hamel = relative(std::abs(p.P * p.P - Px_y - lambda * F2), std::abs(lambda * F2));

  for (int k = 0; k < n; ++k) {
    double trace = 0.0;
    for (int m = 0; m < n; ++m) trace += s.Gjk(m, k, m);
    const double expected = (n + 1) * p.P_y[k];
    r.trace = std::max(r.trace, relative(std::abs(trace - expected), std::abs(expected)));
  }
  return r;
}

HomogeneityLadder homogeneity_ladder(const MetricSpec& spec, std::span<const double> x,
                                     std::span<const double> y, double t) {
  const int n = spec.dimension;
  std::vector<double> ty(y.begin(), y.end());
  for (double& c : ty) c *= t;
  const SprayData a = geodesic_coefficients(spec, x, y);
  const SprayData b = geodesic_coefficients(spec, x, ty);
  HomogeneityLadder h;
  h.G = relative((b.G - t * t * a.G).norm(), (t * t * a.G).norm());
  h.Gj = relative((b.Gj - t * a.Gj).norm(), (t * a.Gj).norm());
  double diff = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) diff = std::max(diff, std::abs(b.Gjk(i, j, k) - a.Gjk(i, j, k)));
  h.Gjk = relative(diff, a.Gjk.max_abs());
  return h;
}

}  // namespace finsler
