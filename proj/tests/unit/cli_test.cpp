#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "runner/commands.hpp"
#include "runner/config.hpp"

namespace finsler::runner {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("finsler_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + FINSLER_BIN + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, DefaultsAndOverrides) {
  ExperimentConfig c = parse_config(json::object(), Command::dim_growth);
  Overrides o;
  o.metric = "funk";
  o.point = parse_point("0.2,-0.1");
  o.seed = 7;
  finalize(c, o);
  EXPECT_EQ(c.metrics, std::vector<std::string>{"funk"});
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0], (Point{0.2, -0.1}));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.N, 64);
  EXPECT_EQ(c.depth_cap, 3);

  ExperimentConfig d = parse_config(json::object(), Command::verify);
  finalize(d, {});
  EXPECT_EQ(d.metrics.size(), 4u);
  EXPECT_EQ(d.points.size(), 5u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config(json{{"colour", 1}}, Command::verify), ConfigError);
  EXPECT_THROW(parse_config(json{{"N", 63}}, Command::verify), ConfigError);
  EXPECT_THROW(parse_config(json{{"depth_cap", 9}}, Command::verify), ConfigError);
  EXPECT_THROW(parse_config(json{{"seed", "abc"}}, Command::verify), ConfigError);
  EXPECT_THROW(parse_config(json{{"metric", "funk"}, {"metrics", {"klein"}}}, Command::verify),
               ConfigError);
  EXPECT_THROW(parse_point("0.1,x"), ConfigError);
  EXPECT_THROW(parse_command("plot"), ConfigError);

  ExperimentConfig c = parse_config(json{{"metric", "nope"}}, Command::verify);
  EXPECT_THROW(finalize(c, {}), ConfigError);
  ExperimentConfig p = parse_config(json{{"points", {{1.5, 0.0}}}}, Command::independence);
  EXPECT_THROW(finalize(p, {}), ConfigError);
  ExperimentConfig n = parse_config(json{{"dimension", 3}}, Command::dim_growth);
  EXPECT_THROW(finalize(n, {}), ConfigError);
}

TEST(Runner, ExitCodes) {
  const fs::path dir = scratch("exit");
  EXPECT_EQ(run("verify --metric euclidean --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "ok" / "table.csv"));
  EXPECT_EQ(run("verify --metric hyperbolic --out " + (dir / "bad").string()), 2);
  EXPECT_EQ(run("verify --point 0.1 --out " + (dir / "bad").string()), 2);
  EXPECT_EQ(run("verify --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);

  // A single round cannot show saturation, so euclidean is misclassified.
  std::ofstream(dir / "one_round.json") << R"({"metric": "euclidean", "depth_cap": 0})";
  EXPECT_EQ(run("dim-growth --config " + (dir / "one_round.json").string() + " --out " +
                (dir / "fail").string()),
            1);
  const json report = json::parse(slurp(dir / "fail" / "report.json"));
  EXPECT_FALSE(report["pass"].get<bool>());
  EXPECT_FALSE(report["failures"].empty());
}

TEST(Runner, ReportShape) {
  const fs::path dir = scratch("shape");
  ASSERT_EQ(run("independence --metric klein --point 0.3,0.1 --out " + dir.string()), 0);
  const json report = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["schema"], 1);
  EXPECT_EQ(report["command"], "independence");
  EXPECT_TRUE(report["pass"].get<bool>());
  const json& r = report["results"][0];
  EXPECT_EQ(r["metric"], "klein");
  EXPECT_EQ(r["product_form"].size(), 3u);
  EXPECT_TRUE(r["affine"]["affine"].get<bool>());
  const std::string csv = slurp(dir / "table.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "metric,x1,x2,form,family,rank,residual,coefficients");
}

TEST(Runner, DeterministicAcrossThreadCounts) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ofstream(a / "cfg.json") << R"({"metrics": ["funk", "klein"], "N": 32, "depth_cap": 2,
                                       "points": [[0.3, 0.1], [-0.2, 0.25]]})";
  const std::string cfg = "--config " + (a / "cfg.json").string();
  ASSERT_EQ(run("dim-growth " + cfg + " --out " + (a / "o").string(), "FINSLER_THREADS=1"), 0);
  ASSERT_EQ(run("dim-growth " + cfg + " --out " + (b / "o").string(), "FINSLER_THREADS=3"), 0);
  EXPECT_EQ(slurp(a / "o" / "report.json"), slurp(b / "o" / "report.json"));
  EXPECT_EQ(slurp(a / "o" / "table.csv"), slurp(b / "o" / "table.csv"));
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.25), "-0.25");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace finsler::runner
