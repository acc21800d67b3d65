#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rwre/config.hpp"
#include "rwre/runner.hpp"

namespace rwre {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rwre_runner_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(RWRE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p, bool drop_wall_clock = false) {
  std::ifstream in(p);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (drop_wall_clock && line.find("wall_clock_seconds") != std::string::npos) continue;
    out << line << '\n';
  }
  return out.str();
}

fs::path small_config(const fs::path& dir) {
  const auto p = dir / "small.cfg";
  std::ofstream(p) << "seed = 5\nboolean.lambda = 0.3\nkernel.kappa = 0.1\n"
                      "experiment.n_blocks = 400\nexperiment.resamples = 100\n";
  return p;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  const auto cfg = small_config(dir);
  EXPECT_EQ(cli("frobnicate --config " + cfg.string()), kExitUnknownSubcommand);
  EXPECT_EQ(cli("blocks --config /nonexistent.cfg --out " + dir.string()), kExitInvalidConfig);
  std::ofstream(dir / "bad.cfg") << "boolean.lambda = 0.3\n";
  EXPECT_EQ(cli("blocks --config " + (dir / "bad.cfg").string() + " --out " + dir.string()), kExitInvalidConfig);
  EXPECT_EQ(cli("blocks --config " + cfg.string() + " --out " + dir.string()), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "blocks.csv"));
  EXPECT_TRUE(fs::exists(dir / "blocks.json"));
  EXPECT_EQ(cli("--help"), kExitOk);
}

TEST(Cli, OutputIndependentOfJobs) {
  const auto dir = scratch("jobs");
  const auto cfg = small_config(dir);
  const auto a = dir / "a", b = dir / "b";
  ASSERT_EQ(cli("blocks --config " + cfg.string() + " --jobs 1 --out " + a.string()), kExitOk);
  ASSERT_EQ(cli("blocks --config " + cfg.string() + " --jobs 4 --out " + b.string()), kExitOk);
  EXPECT_EQ(slurp(a / "blocks.csv"), slurp(b / "blocks.csv"));
  EXPECT_EQ(slurp(a / "blocks.json", true), slurp(b / "blocks.json", true));
}

TEST(Cli, SeedOverrideChangesOutput) {
  const auto dir = scratch("seed");
  const auto cfg = small_config(dir);
  ASSERT_EQ(cli("blocks --config " + cfg.string() + " --out " + (dir / "a").string()), kExitOk);
  ASSERT_EQ(cli("blocks --config " + cfg.string() + " --seed 6 --out " + (dir / "b").string()), kExitOk);
  EXPECT_NE(slurp(dir / "a" / "blocks.csv"), slurp(dir / "b" / "blocks.csv"));
}

TEST(Runner, EverySubcommandHasASchemaLine) {
  const auto help = csv_schema_help();
  for (const auto& name : subcommand_names()) EXPECT_NE(help.find(name), std::string::npos) << name;
}

TEST(Runner, ReportCarriesConfigAndSeed) {
  auto c = ExperimentConfig::parse("seed = 3\nboolean.lambda = 0.3\nkernel.kappa = 0.1\nexperiment.n_instances = 50\n");
  const auto r = run_subcommand("mj", c, 1, true);
  EXPECT_EQ(r.report.seed, 3u);
  EXPECT_EQ(r.report.config_hash, c.hash());
  EXPECT_TRUE(r.report.all_checks_pass());
  const auto json = r.report.to_json();
  EXPECT_NE(json.find("\"checks\""), std::string::npos);
}

}  // namespace
}  // namespace rwre
