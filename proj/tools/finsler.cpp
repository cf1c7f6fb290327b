#include <cstdio>
#include <exception>
#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "finsler/errors.hpp"
#include "runner/commands.hpp"
#include "runner/config.hpp"

using namespace finsler::runner;

int main(int argc, char** argv) {
  CLI::App app{"Finsler holonomy experiments"};
  app.require_subcommand(1);

  std::string config_path, metric, point, out;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> subcommands[] = {
      {"verify", "Check the catalog metrics against their structural identities"},
      {"dim-growth", "Rank of the generated holonomy algebra per bracket depth"},
      {"transport", "Parallel transport drift, loop holonomy and curvature from loops"},
      {"independence", "Function-family ranks and the affine profile test"},
  };
  for (const auto& [name, description] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--metric", metric, "metric id");
    sub->add_option("--point", point, "base point x1,x2 (loop corner for transport)");
    sub->add_option("--seed", seed, "seed for random sampling");
    sub->add_option("--out", out, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Command command = parse_command(app.get_subcommands().front()->get_name());
    const CLI::App* sub = app.get_subcommands().front();
    ExperimentConfig config = config_path.empty() ? parse_config(nlohmann::json::object(), command)
                                                  : load_config(config_path, command);
    Overrides o;
    if (sub->count("--metric")) o.metric = metric;
    if (sub->count("--point")) o.point = parse_point(point);
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--out")) o.out = out;
    finalize(config, o);

    const CommandResult result = run_command(config);
    write_outputs(config, result);
    for (const auto& f : result.failures) std::cerr << "FAIL " << f << '\n';
    std::cout << command_name(command) << ": " << (result.pass() ? "pass" : "fail") << " ("
              << config.out << "/report.json)\n";
    return result.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
