#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/scalar_function.hpp"
#include "finsler/sampling.hpp"

namespace finsler::runner {

// Malformed config or flags; the process exits with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { verify, dim_growth, transport, independence };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct LoopSpec {
  Point corner = {0.1, 0.1};
  double side = 0.2;
};

struct ExperimentConfig {
  Command command = Command::verify;
  std::vector<std::string> metrics;  // empty: every built-in
  int dimension = 2;
  std::vector<Point> points;         // empty: the default base points
  std::uint64_t seed = kDefaultSeed;
  std::string out = "finsler-out";

  int N = 64;
  int depth_cap = 3;
  int field_cap = 64;
  double step = 1e-3;
  std::vector<double> epsilons = {0.04, 0.02, 0.01, 0.005};
  int sample_count = 200;
  int transport_samples = 32;
  LoopSpec loop;

  nlohmann::json to_json() const;
};

// Flag values; set fields replace the config one-to-one.
struct Overrides {
  std::optional<std::string> metric;
  std::optional<Point> point;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

// Strict: unknown keys and ill-typed values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, Command command);
ExperimentConfig load_config(const std::string& path, Command command);

Point parse_point(const std::string& text);

// Applies overrides, fills defaults and validates metric ids, dimensions and
// base points against the chart.
void finalize(ExperimentConfig& config, const Overrides& overrides);

// Away from the origin, where funk and berwald_flat are Euclidean.
std::vector<Point> default_points(int dimension);

}  // namespace finsler::runner
