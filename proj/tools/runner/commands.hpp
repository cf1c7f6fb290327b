#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "runner/config.hpp"

namespace finsler::runner {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct CommandResult {
  nlohmann::json report;  // command-specific body
  Table table;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

CommandResult cmd_verify(const ExperimentConfig& config);
CommandResult cmd_dim_growth(const ExperimentConfig& config);
CommandResult cmd_transport(const ExperimentConfig& config);
CommandResult cmd_independence(const ExperimentConfig& config);

CommandResult run_command(const ExperimentConfig& config);

// <out>/report.json and <out>/table.csv; the directory is created if needed.
void write_outputs(const ExperimentConfig& config, const CommandResult& result);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace finsler::runner
