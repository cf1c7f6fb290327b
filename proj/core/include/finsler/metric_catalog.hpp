#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/sampling.hpp"
#include "finsler/scalar_function.hpp"

namespace finsler {

// A Finsler function on a chart together with the constants it is expected
// to have. Nominal values are hypotheses: flag_curvature_fit confirms them.
struct MetricSpec {
  std::string id;
  int dimension = 2;
  Domain domain;
  std::optional<double> nominal_lambda;
  bool is_riemannian_nominal = false;
  // Geodesics are straight lines in the chart, so G^i = P y^i.
  bool projectively_flat = false;
  std::vector<double> params;
  std::shared_ptr<const ScalarFunction> finsler;
};

enum class Power { F, FSquared };

// Jet of F (or F^2) at (x, y). Throws DomainError outside the chart,
// SlitViolation for y = 0 and InvalidMetric if F is not positive there.
Jet finsler_value(const MetricSpec& spec, std::span<const double> x, std::span<const double> y,
                  int order, Power power = Power::F);

// Plain double evaluation of F, with the same checks.
double finsler_norm(const MetricSpec& spec, std::span<const double> x, std::span<const double> y);

struct DomainCheck {
  bool inside = false;
  double margin = 0.0;
};

DomainCheck domain_contains(const MetricSpec& spec, std::span<const double> x);

// |F(x, t y) - t F(x, y)| / (t F(x, y)).
double homogeneity_residual(const MetricSpec& spec, std::span<const double> x,
                            std::span<const double> y, double t);

// Built-in closed forms. euclidean, klein and funk accept any dimension in
// [2, 4]; berwald_flat is a surface metric.
MetricSpec make_euclidean(int dimension = 2);
MetricSpec make_klein(int dimension = 2);
MetricSpec make_funk(int dimension = 2);
MetricSpec make_berwald_flat();

// Builds a built-in metric by id; throws InvalidMetric for unknown ids or
// unsupported dimensions.
MetricSpec make_builtin(std::string_view id, int dimension = 2);
std::vector<std::string> builtin_ids();

// Id -> metric table. Registration is a setup-time operation; lookups are safe
// from any number of threads.
class MetricCatalog {
 public:
  MetricCatalog() = default;
  MetricCatalog(const MetricCatalog& other);
  MetricCatalog& operator=(const MetricCatalog& other);
  static MetricCatalog with_builtins();

  // Validates homogeneity at `samples` random points and stores the entry.
  // Throws InvalidMetric on a duplicate id, missing function, dimension
  // mismatch or homogeneity violation.
  std::string register_metric(MetricSpec spec, std::uint64_t seed = kDefaultSeed,
                              int samples = 100);

  std::shared_ptr<const MetricSpec> get(std::string_view id) const;
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const MetricSpec>, std::less<>> entries_;
};

}  // namespace finsler
