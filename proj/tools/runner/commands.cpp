#include "runner/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "finsler/errors.hpp"
#include "finsler/holonomy_algebra.hpp"
#include "finsler/metric_catalog.hpp"
#include "finsler/parallel.hpp"
#include "finsler/spray.hpp"
#include "finsler/transport.hpp"

namespace finsler::runner {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

struct Cell {
  json report = json::object();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> failures;
};

std::string point_label(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + format_double(p[i]);
  return s + ")";
}

// Runs cells concurrently into index-owned slots, then merges them in index
// order so the output does not depend on scheduling.
CommandResult run_cells(std::size_t count, const std::function<Cell(std::size_t)>& body,
                        std::vector<std::string> header) {
  std::vector<Cell> cells(count);
  parallel_for(count, default_worker_count(), [&](std::size_t i) { cells[i] = body(i); });
  CommandResult result;
  result.table.header = std::move(header);
  result.report = json::array();
  for (Cell& c : cells) {
    result.report.push_back(std::move(c.report));
    for (auto& row : c.rows) result.table.rows.push_back(std::move(row));
    for (auto& f : c.failures) result.failures.push_back(std::move(f));
  }
  return result;
}

class CheckList {
 public:
  CheckList(std::string metric, Cell& cell) : metric_(std::move(metric)), cell_(cell) {}

  void add(const std::string& name, double residual, double threshold, bool pass,
           json detail = json::object()) {
    json entry = {{"name", name}, {"residual", residual}, {"threshold", threshold}, {"pass", pass}};
    if (!detail.empty()) entry["detail"] = std::move(detail);
    cell_.report["checks"].push_back(std::move(entry));
    cell_.rows.push_back({metric_, name, format_double(residual), format_double(threshold),
                          pass ? "pass" : "fail"});
    if (!pass) cell_.failures.push_back(metric_ + ": " + name);
  }

  void below(const std::string& name, double residual, double threshold,
             json detail = json::object()) {
    add(name, residual, threshold, residual < threshold, std::move(detail));
  }

  void error(const std::string& name, const std::exception& e) {
    cell_.report["checks"].push_back({{"name", name}, {"pass", false}, {"error", e.what()}});
    cell_.rows.push_back({metric_, name, "", "", "fail"});
    cell_.failures.push_back(metric_ + ": " + name + ": " + e.what());
  }

  template <class Fn>
  void guarded(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const FinslerError& e) {
      error(name, e);
    }
  }

 private:
  std::string metric_;
  Cell& cell_;
};

bool expected_finite(const MetricSpec& spec) {
  return spec.is_riemannian_nominal || std::abs(spec.nominal_lambda.value_or(1.0)) < 1e-12;
}

bool nominally_flat(const MetricSpec& spec) {
  return std::abs(spec.nominal_lambda.value_or(1.0)) < 1e-12;
}

Cell verify_metric(const ExperimentConfig& config, const std::string& id) {
  const MetricSpec spec = make_builtin(id, config.dimension);
  Cell cell;
  cell.report = {{"metric", id}, {"dimension", spec.dimension}, {"checks", json::array()}};
  CheckList checks(id, cell);
  const auto samples = sample_tangents(spec.dimension, config.sample_count, config.seed);

  checks.guarded("fundamental_tensor_positive", [&] {
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      const Matrix g = fundamental_tensor(spec, s.x, s.y);
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues()(0));
    }
    checks.add("fundamental_tensor_positive", min_eig, 0.0, min_eig > 0.0);
  });

  checks.guarded("homogeneity_ladder", [&] {
    double worst = 0.0;
    for (const auto& s : samples) {
      const HomogeneityLadder h = homogeneity_ladder(spec, s.x, s.y);
      worst = std::max({worst, h.G, h.Gj, h.Gjk});
    }
    checks.below("homogeneity_ladder", worst, 1e-9);
  });

  double lambda = 0.0;
  checks.guarded("flag_curvature", [&] {
    const FlagCurvatureFit fit = flag_curvature_fit(spec, config.sample_count, config.seed);
    cell.report["lambda_fit"] = fit.lambda;
    const double off = spec.nominal_lambda ? std::abs(fit.lambda - *spec.nominal_lambda) : 0.0;
    lambda = fit.lambda;
    checks.add("flag_curvature", std::max(off, fit.max_residual), 1e-6,
               off < 1e-6 && fit.max_residual < 1e-6,
               {{"lambda_fit", fit.lambda}, {"max_residual", fit.max_residual}});
  });

  if (!spec.projectively_flat) return cell;

  checks.guarded("projective_flatness", [&] {
    checks.below("projective_flatness",
                 projective_flatness_residual(spec, config.sample_count, config.seed), 1e-8);
  });

  checks.guarded("projective_identities", [&] {
    ProjectiveIdentityResiduals worst;
    for (const auto& s : samples) {
      const auto r = projective_identity_residual(spec, s.x, s.y, lambda);
      worst.flatness = std::max(worst.flatness, r.flatness);
      worst.first_derivative = std::max(worst.first_derivative, r.first_derivative);
      worst.second_derivative = std::max(worst.second_derivative, r.second_derivative);
      worst.hamel = std::max(worst.hamel, r.hamel);
      worst.trace = std::max(worst.trace, r.trace);
    }
    checks.below("spray_is_P_y", worst.flatness, 1e-8);
    checks.below("connection_reconstruction", worst.first_derivative, 1e-9);
    checks.below("second_derivative_identity", worst.second_derivative, 1e-8);
    checks.below("hamel_identity", worst.hamel, 1e-8);
    checks.below("trace_identity", worst.trace, 1e-9);
  });

  checks.guarded("rapcsak", [&] {
    double printed = 0.0, corrected = 0.0;
    for (const auto& s : samples) {
      const RapcsakResidual r = rapcsak_residual(spec, s.x, s.y, lambda);
      printed = std::max(printed, r.printed);
      corrected = std::max(corrected, r.corrected);
    }
    const bool p = printed < 1e-7, c = corrected < 1e-7;
    const std::string adopted = p && c ? "both" : c ? "corrected" : p ? "printed" : "none";
    cell.report["rapcsak_variant"] = adopted;
    checks.add("rapcsak", std::min(printed, corrected), 1e-7, p || c,
               {{"printed", printed}, {"corrected", corrected}, {"adopted", adopted}});
  });

  if (spec.dimension == 2) {
    checks.guarded("surface_identities", [&] {
      SurfaceIdentityResiduals worst;
      for (const Point& p : config.points) {
        const auto r = surface_identity_check(spec, p, 10, config.seed);
        worst.first = std::max(worst.first, r.first);
        worst.second = std::max(worst.second, r.second);
      }
      checks.below("nabla_xi_identity", worst.first, 1e-6);
      checks.below("nabla_nabla_xi_identity", worst.second, 1e-6);
    });
  }
  return cell;
}

Cell dim_growth_cell(const ExperimentConfig& config, const std::string& id, const Point& x) {
  const MetricSpec spec = make_builtin(id, 2);
  Cell cell;
  const RankReport rep = generate_algebra(spec, x, config.depth_cap, config.field_cap, config.N);
  const std::string classification = rep.saturated ? "saturated" : "growing";
  const bool finite = expected_finite(spec);

  json rounds = json::array();
  for (const RankRound& r : rep.rounds) {
    rounds.push_back({{"round", r.round},
                      {"field_count", r.field_count},
                      {"rank", r.rank},
                      {"singular_values", r.singular_values},
                      {"fields", r.fields}});
    cell.rows.push_back({id, format_double(x[0]), format_double(x[1]), std::to_string(r.round),
                         std::to_string(r.field_count), std::to_string(r.rank), classification});
  }
  const auto ranks = rep.ranks();
  const bool monotone = std::is_sorted(ranks.begin(), ranks.end());
  cell.report = {{"metric", id},
                 {"point", x},
                 {"ranks", ranks},
                 {"rounds", rounds},
                 {"saturated", rep.saturated},
                 {"truncated", rep.truncated},
                 {"classification", classification},
                 {"expected", finite ? "saturated" : "growing"}};
  if (rep.saturated != finite) {
    cell.failures.push_back(id + " at " + point_label(x) + ": " + classification +
                            ", expected " + (finite ? "saturated" : "growing"));
  }
  if (!monotone) cell.failures.push_back(id + " at " + point_label(x) + ": rank decreased");
  return cell;
}

Cell transport_cell(const ExperimentConfig& config, const std::string& id) {
  const MetricSpec spec = make_builtin(id, 2);
  Cell cell;
  cell.report = {{"metric", id}, {"checks", json::array()}};
  CheckList checks(id, cell);
  const Point& q = config.loop.corner;
  const double s = config.loop.side;
  const ChartCurve loop = ChartCurve::rectangle(q, {s, 0.0}, {0.0, s});

  checks.guarded("holonomy", [&] {
    const HolonomyTable h = loop_holonomy(spec, loop, config.transport_samples, config.step);
    for (std::size_t a = 0; a < h.theta_in.size(); ++a) {
      cell.rows.push_back({id, std::to_string(a), format_double(h.theta_in[a]),
                           format_double(h.theta_out[a])});
    }
    cell.report["holonomy"] = {{"theta_in", h.theta_in},
                               {"theta_out", h.theta_out},
                               {"max_f_drift", h.max_f_drift},
                               {"max_indicatrix_error", h.max_indicatrix_error},
                               {"identity_deviation", h.identity_deviation},
                               {"linear_fit_residual", h.linear_fit_residual},
                               {"derivative_min", h.derivative_min},
                               {"derivative_max", h.derivative_max},
                               {"monotone", h.monotone}};
    checks.below("drift_per_length", h.max_f_drift / loop.length(), 1e-8);
    checks.add("monotone_circle_map", h.derivative_min, 0.0, h.monotone);
    if (nominally_flat(spec)) checks.below("flat_identity", h.identity_deviation, 1e-7);

    const Point& y0 = h.y_in[1];
    const TransportResult there = transport_along(spec, loop, y0, config.step);
    const TransportResult back = transport_along(spec, loop.reversed(), there.y_final, config.step);
    checks.below("loop_then_reverse",
                 std::hypot(back.y_final[0] - y0[0], back.y_final[1] - y0[1]), 1e-8);
  });

  checks.guarded("curvature_from_loops", [&] {
    const Point y = indicatrix_point(spec, q, 0.3).y;
    const LoopCurvatureFit fit =
        curvature_from_loops(spec, q, Point{1.0, 0.0}, Point{0.0, 1.0}, y, config.epsilons,
                             config.step);
    cell.report["curvature_from_loops"] = {{"epsilons", fit.epsilons},
                                           {"errors", fit.errors},
                                           {"slope", fit.slope},
                                           {"exact", fit.exact}};
    checks.add("curvature_from_loops", fit.exact ? 0.0 : fit.slope, 0.0, true,
               {{"exact", fit.exact}});
  });
  return cell;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

json family_json(const FunctionFamily& f) {
  return {{"label", f.label},
          {"singular_values", f.singular_values},
          {"rank", f.rank},
          {"coefficients", f.coefficients},
          {"residual", f.residual},
          {"simultaneously_nonvanishing", f.simultaneously_nonvanishing}};
}

Cell independence_cell(const ExperimentConfig& config, const std::string& id, const Point& x) {
  const MetricSpec spec = make_builtin(id, 2);
  Cell cell;
  const DependenceTestResult dep = function_independence_rank(spec, x, config.N);
  const AffineFactorResult aff = affine_factor_test(spec, x);
  const std::string where = id + " at " + point_label(x);

  auto row = [&](const std::string& form, const FunctionFamily& f) {
    cell.rows.push_back({id, format_double(x[0]), format_double(x[1]), form, f.label,
                         std::to_string(f.rank), format_double(f.residual), join(f.coefficients)});
  };
  row("base", dep.base);
  json product = json::array(), hessian = json::array();
  for (const auto& f : dep.product_form) {
    row("product", f);
    product.push_back(family_json(f));
  }
  for (const auto& f : dep.hessian_form) {
    row("hessian", f);
    hessian.push_back(family_json(f));
  }

  cell.report = {{"metric", id},
                 {"point", x},
                 {"lambda", dep.lambda},
                 {"base", family_json(dep.base)},
                 {"product_form", product},
                 {"hessian_form", hessian},
                 {"max_product_rank", dep.max_product_rank},
                 {"max_hessian_rank", dep.max_hessian_rank},
                 {"affine", {{"affine", aff.affine},
                             {"max_f", aff.max_f},
                             {"max_f2", aff.max_f2},
                             {"alpha", aff.alpha},
                             {"beta", aff.beta},
                             {"c", {aff.c1, aff.c2, aff.c3}},
                             {"b", {aff.b1, aff.b2, aff.b3}},
                             {"system_residual", aff.system_residual}}}};

  if (!aff.affine && dep.base.rank != 3) {
    cell.failures.push_back(where + ": P is non-linear but {1, P1, P2} has rank " +
                            std::to_string(dep.base.rank));
  }
  if (aff.affine) {
    for (const auto& f : dep.product_form) {
      if (f.residual >= 1e-8) cell.failures.push_back(where + ": affine P but " + f.label + " independent");
    }
  }
  if (!aff.affine && std::abs(dep.lambda) > 1e-12 && dep.max_product_rank != 4) {
    cell.failures.push_back(where + ": no four-function family reaches rank 4");
  }
  return cell;
}

}  // namespace

CommandResult cmd_verify(const ExperimentConfig& config) {
  return run_cells(
      config.metrics.size(), [&](std::size_t i) { return verify_metric(config, config.metrics[i]); },
      {"metric", "check", "residual", "threshold", "status"});
}

CommandResult cmd_dim_growth(const ExperimentConfig& config) {
  const std::size_t P = config.points.size();
  return run_cells(
      config.metrics.size() * P,
      [&](std::size_t i) { return dim_growth_cell(config, config.metrics[i / P], config.points[i % P]); },
      {"metric", "x1", "x2", "round", "field_count", "rank", "classification"});
}

CommandResult cmd_transport(const ExperimentConfig& config) {
  return run_cells(
      config.metrics.size(), [&](std::size_t i) { return transport_cell(config, config.metrics[i]); },
      {"metric", "index", "theta_in", "theta_out"});
}

CommandResult cmd_independence(const ExperimentConfig& config) {
  const std::size_t P = config.points.size();
  return run_cells(
      config.metrics.size() * P,
      [&](std::size_t i) {
        return independence_cell(config, config.metrics[i / P], config.points[i % P]);
      },
      {"metric", "x1", "x2", "form", "family", "rank", "residual", "coefficients"});
}

CommandResult run_command(const ExperimentConfig& config) {
  switch (config.command) {
    case Command::verify: return cmd_verify(config);
    case Command::dim_growth: return cmd_dim_growth(config);
    case Command::transport: return cmd_transport(config);
    case Command::independence: return cmd_independence(config);
  }
  throw ConfigError("unknown command");
}

void write_outputs(const ExperimentConfig& config, const CommandResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out);

  const json doc = {{"schema", 1},
                    {"command", command_name(config.command)},
                    {"config", config.to_json()},
                    {"pass", result.pass()},
                    {"failures", result.failures},
                    {"results", result.report}};
  std::ofstream report(fs::path(config.out) / "report.json");
  report << doc.dump(2) << '\n';

  std::ofstream csv(fs::path(config.out) / "table.csv");
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const bool quote = cells[i].find_first_of(",\"") != std::string::npos;
      if (i) csv << ',';
      if (quote) {
        csv << '"';
        for (char ch : cells[i]) csv << (ch == '"' ? "\"\"" : std::string(1, ch));
        csv << '"';
      } else {
        csv << cells[i];
      }
    }
    csv << '\n';
  };
  line(result.table.header);
  for (const auto& row : result.table.rows) line(row);
  if (!report || !csv) throw std::runtime_error("cannot write outputs to '" + config.out + "'");
}

}  // namespace finsler::runner
