#include "finsler/metric_catalog.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// |y|^2 - (|x|^2 |y|^2 - <x,y>^2), the radicand shared by Funk and Berwald.
template <class T>
T funk_radicand(std::span<const T> x, std::span<const T> y) {
  const T yy = dot(y, y);
  const T xy = dot(x, y);
  return yy - (dot(x, x) * yy - xy * xy);
}

struct Euclidean {
  template <class T>
  T operator()(std::span<const T> /*x*/, std::span<const T> y) const {
    using std::sqrt;
    return sqrt(dot(y, y));
  }
};

struct Klein {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    const T s = 1.0 - dot(x, x);
    const T xy = dot(x, y);
    return sqrt(dot(y, y) * s + xy * xy) / s;
  }
};

struct Funk {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    return (sqrt(funk_radicand(x, y)) + dot(x, y)) / (1.0 - dot(x, x));
  }
};

struct BerwaldFlat {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    const T root = sqrt(funk_radicand(x, y));
    const T numerator = root + dot(x, y);
    const T s = 1.0 - dot(x, x);
    return numerator * numerator / (s * s * root);
  }
};

void check_dimension(std::string_view id, int dimension) {
  if (dimension < 2 || dimension > 4) {
    throw InvalidMetric(std::string(id) + ": dimension must be in [2, 4], got " +
                        std::to_string(dimension));
  }
}

}  // namespace

Jet finsler_value(const MetricSpec& spec, std::span<const double> x, std::span<const double> y,
                  int order, Power power) {
  check_point(spec.dimension, spec.domain, x, y);
  Jet f = jet_eval(*spec.finsler, x, y, order);
  if (!(f.value() > 0.0)) throw InvalidMetric(spec.id + ": F is not positive at the point");
  if (power == Power::FSquared) f = f * f;
  return f;
}

double finsler_norm(const MetricSpec& spec, std::span<const double> x, std::span<const double> y) {
  check_point(spec.dimension, spec.domain, x, y);
  const double f = spec.finsler->evaluate(x, y);
  if (!(f > 0.0)) throw InvalidMetric(spec.id + ": F is not positive at the point");
  return f;
}

DomainCheck domain_contains(const MetricSpec& spec, std::span<const double> x) {
  const double margin = spec.domain.margin(x);
  return {margin > 0.0, margin};
}

double homogeneity_residual(const MetricSpec& spec, std::span<const double> x,
                            std::span<const double> y, double t) {
  std::vector<double> ty(y.begin(), y.end());
  for (double& c : ty) c *= t;
  const double base = finsler_norm(spec, x, y);
  return std::abs(finsler_norm(spec, x, ty) - t * base) / (t * base);
}

MetricSpec make_euclidean(int dimension) {
  check_dimension("euclidean", dimension);
  MetricSpec spec;
  spec.id = "euclidean";
  spec.dimension = dimension;
  spec.domain = Domain::everywhere();
  spec.nominal_lambda = 0.0;
  spec.is_riemannian_nominal = true;
  spec.projectively_flat = true;
  spec.finsler = make_scalar_function(dimension, spec.domain, Euclidean{});
  return spec;
}

MetricSpec make_klein(int dimension) {
  check_dimension("klein", dimension);
  MetricSpec spec;
  spec.id = "klein";
  spec.dimension = dimension;
  spec.domain = Domain::unit_ball();
  spec.nominal_lambda = -1.0;
  spec.is_riemannian_nominal = true;
  spec.projectively_flat = true;
  spec.params = {1.0};
  spec.finsler = make_scalar_function(dimension, spec.domain, Klein{});
  return spec;
}

MetricSpec make_funk(int dimension) {
  check_dimension("funk", dimension);
  MetricSpec spec;
  spec.id = "funk";
  spec.dimension = dimension;
  spec.domain = Domain::unit_ball();
  spec.nominal_lambda = -0.25;
  spec.is_riemannian_nominal = false;
  spec.projectively_flat = true;
  spec.params = {1.0};
  spec.finsler = make_scalar_function(dimension, spec.domain, Funk{});
  return spec;
}

MetricSpec make_berwald_flat() {
  MetricSpec spec;
  spec.id = "berwald_flat";
  spec.dimension = 2;
  spec.domain = Domain::unit_ball();
  spec.nominal_lambda = 0.0;
  spec.is_riemannian_nominal = false;
  spec.projectively_flat = true;
  spec.params = {1.0};
  spec.finsler = make_scalar_function(2, spec.domain, BerwaldFlat{});
  return spec;
}

MetricSpec make_builtin(std::string_view id, int dimension) {
  if (id == "euclidean") return make_euclidean(dimension);
  if (id == "klein") return make_klein(dimension);
  if (id == "funk") return make_funk(dimension);
  if (id == "berwald_flat") {
    if (dimension != 2) throw InvalidMetric("berwald_flat: only dimension 2 is supported");
    return make_berwald_flat();
  }
  throw InvalidMetric("unknown metric id '" + std::string(id) + "'");
}

std::vector<std::string> builtin_ids() { return {"euclidean", "klein", "funk", "berwald_flat"}; }

MetricCatalog::MetricCatalog(const MetricCatalog& other) {
  std::shared_lock lock(other.mutex_);
  entries_ = other.entries_;
}

MetricCatalog& MetricCatalog::operator=(const MetricCatalog& other) {
  if (this == &other) return *this;
  std::map<std::string, std::shared_ptr<const MetricSpec>, std::less<>> copy;
  {
    std::shared_lock lock(other.mutex_);
    copy = other.entries_;
  }
  std::unique_lock lock(mutex_);
  entries_ = std::move(copy);
  return *this;
}

MetricCatalog MetricCatalog::with_builtins() {
  MetricCatalog catalog;
  for (const std::string& id : builtin_ids()) catalog.register_metric(make_builtin(id));
  return catalog;
}

std::string MetricCatalog::register_metric(MetricSpec spec, std::uint64_t seed, int samples) {
  if (spec.id.empty()) throw InvalidMetric("metric id must not be empty");
  if (!spec.finsler) throw InvalidMetric(spec.id + ": no Finsler function supplied");
  if (spec.finsler->dimension() != spec.dimension) {
    throw InvalidMetric(spec.id + ": function dimension does not match the spec");
  }
  for (const TangentSample& s : sample_tangents(spec.dimension, samples, seed)) {
    if (!spec.domain.contains(s.x)) continue;
    for (double t : {0.5, 2.0, 10.0}) {
      const double r = homogeneity_residual(spec, s.x, s.y, t);
      if (!(r <= 1e-12)) {
        throw InvalidMetric(spec.id + ": F(x, t y) != t F(x, y) (t = " + std::to_string(t) +
                            ", relative deviation " + std::to_string(r) + ")");
      }
    }
  }

  std::unique_lock lock(mutex_);
  if (entries_.count(spec.id) != 0) throw InvalidMetric("metric id '" + spec.id + "' already registered");
  std::string id = spec.id;
  entries_.emplace(id, std::make_shared<const MetricSpec>(std::move(spec)));
  return id;
}

std::shared_ptr<const MetricSpec> MetricCatalog::get(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) throw InvalidMetric("unknown metric id '" + std::string(id) + "'");
  return it->second;
}

bool MetricCatalog::contains(std::string_view id) const {
  std::shared_lock lock(mutex_);
  return entries_.find(id) != entries_.end();
}

std::vector<std::string> MetricCatalog::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, spec] : entries_) out.push_back(id);
  return out;
}

}  // namespace finsler
