#include "runner/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/metric_catalog.hpp"

namespace finsler::runner {

using nlohmann::json;

Command parse_command(const std::string& name) {
  if (name == "verify") return Command::verify;
  if (name == "dim-growth") return Command::dim_growth;
  if (name == "transport") return Command::transport;
  if (name == "independence") return Command::independence;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::verify: return "verify";
    case Command::dim_growth: return "dim-growth";
    case Command::transport: return "transport";
    case Command::independence: return "independence";
  }
  return {};
}

json ExperimentConfig::to_json() const {
  return {
      {"command", command_name(command)},
      {"metrics", metrics},
      {"dimension", dimension},
      {"points", points},
      {"seed", seed},
      {"N", N},
      {"depth_cap", depth_cap},
      {"field_cap", field_cap},
      {"step", step},
      {"epsilons", epsilons},
      {"sample_count", sample_count},
      {"transport_samples", transport_samples},
      {"loop", {{"corner", loop.corner}, {"side", loop.side}}},
  };
}

namespace {

template <class T>
T get_as(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void require_positive(int v, const char* key) {
  if (v <= 0) throw ConfigError(std::string("config: '") + key + "' must be positive");
}

}  // namespace

ExperimentConfig parse_config(const json& doc, Command command) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> known = {
      "metric", "metrics", "dimension", "points", "seed", "out", "N", "depth_cap",
      "field_cap", "step", "epsilons", "sample_count", "transport_samples", "loop"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }

  ExperimentConfig c;
  c.command = command;
  if (doc.contains("metric") && doc.contains("metrics")) {
    throw ConfigError("config: give either 'metric' or 'metrics'");
  }
  if (doc.contains("metric")) c.metrics = {get_as<std::string>(doc, "metric")};
  if (doc.contains("metrics")) c.metrics = get_as<std::vector<std::string>>(doc, "metrics");
  if (doc.contains("dimension")) c.dimension = get_as<int>(doc, "dimension");
  if (doc.contains("points")) c.points = get_as<std::vector<Point>>(doc, "points");
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("out")) c.out = get_as<std::string>(doc, "out");
  if (doc.contains("N")) c.N = get_as<int>(doc, "N");
  if (doc.contains("depth_cap")) c.depth_cap = get_as<int>(doc, "depth_cap");
  if (doc.contains("field_cap")) c.field_cap = get_as<int>(doc, "field_cap");
  if (doc.contains("step")) c.step = get_as<double>(doc, "step");
  if (doc.contains("epsilons")) c.epsilons = get_as<std::vector<double>>(doc, "epsilons");
  if (doc.contains("sample_count")) c.sample_count = get_as<int>(doc, "sample_count");
  if (doc.contains("transport_samples")) {
    c.transport_samples = get_as<int>(doc, "transport_samples");
  }
  if (doc.contains("loop")) {
    const json& loop = doc.at("loop");
    if (!loop.is_object()) throw ConfigError("config: 'loop' must be an object");
    for (const auto& [key, value] : loop.items()) {
      if (key != "corner" && key != "side") throw ConfigError("config: unknown loop key '" + key + "'");
    }
    if (loop.contains("corner")) c.loop.corner = get_as<Point>(loop, "corner");
    if (loop.contains("side")) c.loop.side = get_as<double>(loop, "side");
  }

  require_positive(c.N, "N");
  require_positive(c.field_cap, "field_cap");
  require_positive(c.sample_count, "sample_count");
  require_positive(c.transport_samples, "transport_samples");
  if (c.N % 2 != 0 || c.N < 4 || c.transport_samples % 2 != 0 || c.transport_samples < 4) {
    throw ConfigError("config: 'N' and 'transport_samples' must be even and >= 4");
  }
  if (c.depth_cap < 0 || c.depth_cap > 4) throw ConfigError("config: 'depth_cap' must be in [0, 4]");
  if (!(c.step > 0.0 && c.step <= 0.1)) throw ConfigError("config: 'step' must be in (0, 0.1]");
  if (c.epsilons.size() < 2) throw ConfigError("config: need at least two 'epsilons'");
  for (double e : c.epsilons) {
    if (!(e > 0.0 && e < 0.5)) throw ConfigError("config: 'epsilons' must lie in (0, 0.5)");
  }
  if (!(c.loop.side > 0.0)) throw ConfigError("config: loop 'side' must be positive");
  return c;
}

ExperimentConfig load_config(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(doc, command);
}

Point parse_point(const std::string& text) {
  Point p;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("--point: '" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw ConfigError("--point: '" + item + "' is not a number");
    }
    p.push_back(v);
  }
  if (p.empty()) throw ConfigError("--point: empty");
  return p;
}

std::vector<Point> default_points(int dimension) {
  std::vector<Point> pts = {{0.3, 0.1}, {-0.2, 0.25}, {0.1, -0.4}, {0.45, 0.2}, {-0.35, -0.3}};
  for (Point& p : pts) p.resize(dimension, 0.0);
  return pts;
}

void finalize(ExperimentConfig& c, const Overrides& o) {
  if (o.metric) c.metrics = {*o.metric};
  if (o.point) {
    if (c.command == Command::transport) c.loop.corner = *o.point;
    else c.points = {*o.point};
  }
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;

  if (c.metrics.empty()) {
    c.metrics = c.dimension == 2 ? builtin_ids() : std::vector<std::string>{"euclidean", "klein", "funk"};
  }
  if (c.points.empty()) c.points = default_points(c.dimension);
  if (c.command != Command::verify && c.dimension != 2) {
    throw ConfigError(command_name(c.command) + ": surfaces only (dimension 2)");
  }

  std::vector<Point> loop_vertices;
  if (c.command == Command::transport) {
    if (static_cast<int>(c.loop.corner.size()) != c.dimension) {
      throw ConfigError("loop corner has the wrong dimension");
    }
    const Point& q = c.loop.corner;
    const double s = c.loop.side;
    loop_vertices = {q, {q[0] + s, q[1]}, {q[0] + s, q[1] + s}, {q[0], q[1] + s}};
  }

  for (const std::string& id : c.metrics) {
    MetricSpec spec;
    try {
      spec = make_builtin(id, c.dimension);
    } catch (const FinslerError& e) {
      throw ConfigError(e.what());
    }
    for (const Point& p : c.command == Command::transport ? loop_vertices : c.points) {
      if (static_cast<int>(p.size()) != c.dimension) {
        throw ConfigError("base point has the wrong dimension");
      }
      if (!domain_contains(spec, p).inside) {
        throw ConfigError("point outside the chart of '" + id + "'");
      }
    }
  }
}

}  // namespace finsler::runner
