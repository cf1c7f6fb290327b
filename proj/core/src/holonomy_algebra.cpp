#include "finsler/holonomy_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "finsler/errors.hpp"
#include "finsler/parallel.hpp"
#include "finsler/spectral.hpp"
#include "finsler/spray.hpp"

namespace finsler {
namespace {

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s / static_cast<double>(v.size()));
}

void require_surface(const MetricSpec& spec, const char* what) {
  if (spec.dimension != 2) throw PreconditionError(std::string(what) + ": surfaces only");
}

std::vector<double> unit_vector(int n, int i) {
  std::vector<double> e(n, 0.0);
  e[i] = 1.0;
  return e;
}

// Fitted, never nominal: the catalog constants are hypotheses.
double lambda_at(const MetricSpec& spec, std::span<const double> x, std::span<const double> y) {
  return riemann_curvature(spec, x, y).lambda_fit;
}

// values[c][a] for every candidate c and grid point a.
std::vector<std::vector<Vector>> evaluate_on_grid(
    std::vector<std::unique_ptr<FieldEvaluator>>& evaluators,
    const std::vector<VerticalField>& fields, int workers) {
  const std::size_t N = evaluators.size();
  std::vector<std::vector<Vector>> values(fields.size(), std::vector<Vector>(N));
  parallel_for(N, workers, [&](std::size_t a) {
    for (std::size_t c = 0; c < fields.size(); ++c) values[c][a] = evaluators[a]->values(fields[c]);
  });
  return values;
}

// Row-normalised family matrix; rows with negligible RMS stay zero.
Matrix normalised_rows(const std::vector<std::vector<double>>& rows, double floor) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double scale = rms(rows[r]);
    for (std::size_t a = 0; a < rows[r].size(); ++a) {
      m(r, a) = scale > floor ? rows[r][a] / scale : 0.0;
    }
  }
  return m;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

FunctionFamily analyse_family(std::string label, int j, int k,
                              const std::vector<std::vector<double>>& functions) {
  FunctionFamily fam;
  fam.label = std::move(label);
  fam.j = j;
  fam.k = k;
  const Matrix m = normalised_rows(functions, 1e-12);
  const Vector sv = singular_values(m);
  fam.singular_values = to_std(sv);
  fam.rank = numerical_rank(sv, kRankThreshold, 1e-12);

  const std::size_t N = functions.front().size();
  const std::size_t p = functions.size() - 1;
  Matrix A(N, p);
  Vector b(N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t c = 0; c < p; ++c) A(a, c) = functions[c][a];
    b(a) = functions[p][a];
  }
  const Vector coef = least_squares(A, b);
  fam.coefficients = to_std(coef);
  const Vector err = A * coef - b;
  fam.residual = rms(to_std(err)) / (1.0 + rms(functions[p]));

  for (std::size_t a = 0; a < N && !fam.simultaneously_nonvanishing; ++a) {
    bool all = true;
    for (const auto& f : functions) {
      double peak = 0.0;
      for (double v : f) peak = std::max(peak, std::abs(v));
      if (!(std::abs(f[a]) > 1e-8 * (1.0 + peak))) all = false;
    }
    fam.simultaneously_nonvanishing = all;
  }
  return fam;
}

}  // namespace

VerticalField curvature_field(const MetricSpec& spec, std::span<const double> X,
                              std::span<const double> Y) {
  if (static_cast<int>(X.size()) != spec.dimension || static_cast<int>(Y.size()) != spec.dimension) {
    throw std::invalid_argument("curvature_field: X and Y must match the metric dimension");
  }
  return VerticalField::curvature({X.begin(), X.end()}, {Y.begin(), Y.end()});
}

std::vector<double> restrict_values(const IndicatrixSampling& sampling,
                                    const std::vector<Vector>& values) {
  if (static_cast<int>(values.size()) != sampling.size()) {
    throw std::invalid_argument("restrict_values: one value per sample required");
  }
  std::vector<double> coef(values.size());
  for (std::size_t a = 0; a < values.size(); ++a) {
    const Point& T = sampling.tangents[a];
    const Vector& v = values[a];
    const double c = v(0) * T[0] + v(1) * T[1];
    const double normal = std::hypot(v(0) - c * T[0], v(1) - c * T[1]);
    if (normal > kTangencyTolerance * (1.0 + v.norm())) {
      throw TangencyError("restrict: field not tangent to the indicatrix at theta = " +
                          std::to_string(sampling.theta[a]) + " (normal part " +
                          std::to_string(normal) + ")");
    }
    coef[a] = c;
  }
  return coef;
}

std::vector<double> restrict_to_indicatrix(const MetricSpec& spec, const VerticalField& field,
                                           const IndicatrixSampling& sampling, int workers) {
  const int N = sampling.size();
  std::vector<Vector> values(N);
  parallel_for(N, workers, [&](std::size_t a) {
    FieldEvaluator ev(spec, sampling.x, sampling.points[a], field.depth());
    values[a] = ev.values(field);
  });
  return restrict_values(sampling, values);
}

double bracket_consistency_residual(const MetricSpec& spec, const VerticalField& xi,
                                    const VerticalField& eta, const IndicatrixSampling& sampling,
                                    int workers) {
  const VerticalField br = vertical_bracket(xi, eta);
  const int N = sampling.size();
  std::vector<Vector> va(N), vb(N), vc(N);
  parallel_for(N, workers, [&](std::size_t a) {
    FieldEvaluator ev(spec, sampling.x, sampling.points[a], br.depth());
    va[a] = ev.values(xi);
    vb[a] = ev.values(eta);
    vc[a] = ev.values(br);
  });
  const auto A = restrict_values(sampling, va);
  const auto B = restrict_values(sampling, vb);
  const auto C = restrict_values(sampling, vc);
  auto dA = spectral_derivative(A);
  auto dB = spectral_derivative(B);
  double peak = 0.0, worst = 0.0;
  for (int a = 0; a < N; ++a) {
    dA[a] /= sampling.speed[a];
    dB[a] /= sampling.speed[a];
    peak = std::max(peak, std::abs(C[a]));
    worst = std::max(worst, std::abs(C[a] - (A[a] * dB[a] - B[a] * dA[a])));
  }
  return worst / (1.0 + peak);
}

std::vector<int> RankReport::ranks() const {
  std::vector<int> r;
  for (const RankRound& round : rounds) r.push_back(round.rank);
  return r;
}

RankReport generate_algebra(const MetricSpec& spec, std::span<const double> x, int depth_cap,
                            int field_cap, int N, int workers) {
  require_surface(spec, "generate_algebra");
  if (depth_cap < 0 || depth_cap > 4) {
    throw PreconditionError("generate_algebra: depth_cap must be in [0, 4]");
  }
  if (field_cap < 1) throw PreconditionError("generate_algebra: field_cap must be positive");

  RankReport report;
  report.metric = spec.id;
  report.x.assign(x.begin(), x.end());
  report.N = N;
  report.depth_cap = depth_cap;
  report.field_cap = field_cap;

  const IndicatrixSampling sampling = indicatrix_parametrize(spec, x, N);
  std::vector<std::unique_ptr<FieldEvaluator>> evaluators(N);
  parallel_for(N, workers, [&](std::size_t a) {
    evaluators[a] = std::make_unique<FieldEvaluator>(spec, x, sampling.points[a], depth_cap);
  });

  std::vector<VerticalField> accepted;
  std::vector<std::vector<double>> coefficients;  // raw
  std::vector<Vector> directions;                 // unit
  std::size_t round_start = 0;

  std::vector<VerticalField> candidates;
  for (int j = 0; j < spec.dimension; ++j)
    for (int k = j + 1; k < spec.dimension; ++k)
      candidates.push_back(
          curvature_field(spec, unit_vector(spec.dimension, j), unit_vector(spec.dimension, k)));

  for (int d = 0; d <= depth_cap; ++d) {
    if (d > 0) {
      candidates.clear();
      const std::size_t fresh_end = accepted.size();
      for (std::size_t f = round_start; f < fresh_end; ++f)
        for (int k = 0; k < spec.dimension; ++k)
          candidates.push_back(covariant_derivative(accepted[f], k));
      for (std::size_t f = round_start; f < fresh_end; ++f)
        for (std::size_t g = 0; g < f; ++g)
          candidates.push_back(vertical_bracket(accepted[f], accepted[g]));
      round_start = fresh_end;
    }

    const auto values = evaluate_on_grid(evaluators, candidates, workers);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::vector<double> coef = restrict_values(sampling, values[c]);
      if (rms(coef) < kZeroFieldTolerance) continue;
      Vector u = Eigen::Map<const Vector>(coef.data(), N);
      u.normalize();
      bool duplicate = false;
      for (const Vector& v : directions) {
        if (std::abs(u.dot(v)) > 1.0 - kCollinearityTolerance) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      if (static_cast<int>(accepted.size()) >= field_cap) {
        report.truncated = true;
        break;
      }
      accepted.push_back(candidates[c]);
      coefficients.push_back(std::move(coef));
      directions.push_back(std::move(u));
    }

    RankRound round;
    round.round = d;
    round.field_count = static_cast<int>(accepted.size());
    for (const VerticalField& f : accepted) round.fields.push_back(f.describe());
    round.coefficients = coefficients;
    if (!coefficients.empty()) {
      const Vector sv = singular_values(normalised_rows(coefficients, 0.0));
      round.singular_values = to_std(sv);
      round.rank = numerical_rank(sv, kRankThreshold);
    }
    report.rounds.push_back(std::move(round));
  }

  const std::size_t R = report.rounds.size();
  report.saturated = R >= 2 && report.rounds[R - 1].rank == report.rounds[R - 2].rank;
  return report;
}

SurfaceIdentityResiduals surface_identity_check(const MetricSpec& spec, std::span<const double> x,
                                                int sample_count, std::uint64_t seed) {
  require_surface(spec, "surface_identity_check");
  if (!spec.projectively_flat) {
    throw PreconditionError("surface_identity_check: metric is not projectively flat");
  }
  SurfaceIdentityResiduals out;
  const VerticalField xi = curvature_field(spec, unit_vector(2, 0), unit_vector(2, 1));
  const VerticalField d1[2] = {covariant_derivative(xi, 0), covariant_derivative(xi, 1)};
  for (const Point& y : sample_directions(2, sample_count, seed)) {
    FieldEvaluator ev(spec, x, y, 2);
    const ProjectiveData pd = projective_factor(spec, x, y);
    const Matrix g = fundamental_tensor(spec, x, y);
    const double lambda = lambda_at(spec, x, y);
    out.lambda = lambda;
    const Vector v = ev.values(xi);
    for (int k = 0; k < 2; ++k) {
      const Vector lhs = ev.values(d1[k]);
      const Vector rhs = 3.0 * pd.P_y(k) * v;
      out.first = std::max(out.first, (lhs - rhs).norm() / (1.0 + rhs.norm()));
      for (int j = 0; j < 2; ++j) {
        const Vector lhs2 = ev.values(covariant_derivative(d1[k], j));
        const Vector rhs2 = 3.0 * (4.0 * pd.P_y(j) * pd.P_y(k) - lambda * g(j, k)) * v;
        out.second = std::max(out.second, (lhs2 - rhs2).norm() / (1.0 + rhs2.norm()));
      }
    }
  }
  return out;
}

DependenceTestResult function_independence_rank(const MetricSpec& spec, std::span<const double> x,
                                                int N) {
  require_surface(spec, "function_independence_rank");
  if (!spec.projectively_flat) {
    throw PreconditionError("function_independence_rank: metric is not projectively flat");
  }
  const IndicatrixSampling sampling = indicatrix_parametrize(spec, x, N);
  DependenceTestResult out;
  out.x.assign(x.begin(), x.end());
  out.N = N;
  out.lambda = lambda_at(spec, x, sampling.points[0]);

  std::vector<double> one(N, 1.0), P1(N), P2(N);
  std::vector<std::vector<double>> prod(3, std::vector<double>(N));
  std::vector<std::vector<double>> hess(3, std::vector<double>(N));
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int a = 0; a < N; ++a) {
    const Point& y = sampling.points[a];
    const ProjectiveData pd = projective_factor(spec, x, y);
    const Matrix g = fundamental_tensor(spec, x, y);
    P1[a] = pd.P_y(0);
    P2[a] = pd.P_y(1);
    for (int p = 0; p < 3; ++p) {
      const int j = pairs[p][0], k = pairs[p][1];
      prod[p][a] = pd.P_y(j) * pd.P_y(k) - 0.25 * out.lambda * g(j, k);
      hess[p][a] = pd.P_yy(j, k) - 0.25 * out.lambda * g(j, k);
    }
  }

  out.base = analyse_family("1,P1,P2", -1, -1, {one, P1, P2});
  for (int p = 0; p < 3; ++p) {
    const int j = pairs[p][0], k = pairs[p][1];
    const std::string jk = std::to_string(j + 1) + std::to_string(k + 1);
    out.product_form.push_back(
        analyse_family("1,P1,P2,P" + std::to_string(j + 1) + "P" + std::to_string(k + 1) +
                           "-lambda/4 g" + jk,
                       j, k, {one, P1, P2, prod[p]}));
    out.hessian_form.push_back(
        analyse_family("1,P1,P2,P" + jk + "-lambda/4 g" + jk, j, k, {one, P1, P2, hess[p]}));
    out.max_product_rank = std::max(out.max_product_rank, out.product_form.back().rank);
    out.max_hessian_rank = std::max(out.max_hessian_rank, out.hessian_form.back().rank);
  }
  return out;
}

AffineFactorResult affine_factor_test(const MetricSpec& spec, std::span<const double> x) {
  require_surface(spec, "affine_factor_test");
  if (!spec.projectively_flat) {
    throw PreconditionError("affine_factor_test: metric is not projectively flat");
  }
  constexpr int kPoints = 41;
  constexpr double kFrom = 0.2, kTo = 2.0, v = 1.0;
  const double h = (kTo - kFrom) / (kPoints - 1);

  AffineFactorResult out;
  for (int s = 0; s < kPoints; ++s) {
    const double t = kFrom + s * h;
    const Point y = {t * v, v};
    out.t.push_back(t);
    out.f.push_back(projective_factor(spec, x, y).P / v);
    out.max_f = std::max(out.max_f, std::abs(out.f.back()));
  }
  for (int s = 1; s + 1 < kPoints; ++s) {
    const double f2 = (out.f[s + 1] - 2.0 * out.f[s] + out.f[s - 1]) / (h * h);
    out.max_f2 = std::max(out.max_f2, std::abs(f2));
  }
  out.affine = out.max_f2 < 1e-8 * (1.0 + out.max_f);

  Matrix A(kPoints, 2);
  Vector b(kPoints);
  for (int s = 0; s < kPoints; ++s) {
    A(s, 0) = out.t[s];
    A(s, 1) = 1.0;
    b(s) = out.f[s];
  }
  const Vector fit = least_squares(A, b);
  out.alpha = fit(0);
  out.beta = fit(1);

  // f = -c2 t - b2 with c1 = b3 = 0, b1 = 2 c2, c3 = 2 b2.
  out.c2 = -out.alpha;
  out.b2 = -out.beta;
  out.b1 = 2.0 * out.c2;
  out.c3 = 2.0 * out.b2;
  out.c1 = 0.0;
  out.b3 = 0.0;
  for (int s = 0; s < kPoints; ++s) {
    const double t = out.t[s], f = out.f[s];
    const double e1 = f + out.b2 + (out.b1 - out.c2) * t - out.c1 * t * t;
    const double e2 = t * f - out.b3 + (out.c3 - out.b2) * t + out.c2 * t * t;
    out.system_residual = std::max({out.system_residual, std::abs(e1), std::abs(e2)});
  }
  return out;
}

}  // namespace finsler
