#pragma once

// Subcommand dispatch for the command-line runner. Each subcommand turns an
// ExperimentConfig into a DiagnosticsReport plus one CSV table; run() adds
// file output, plots and exit codes.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rwre/config.hpp"
#include "rwre/report.hpp"

namespace rwre {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInvalidConfig = 2,
  kExitCheckFailed = 3,
  kExitUnknownSubcommand = 4,
  kExitResource = 5,
  kExitDiagnostics = 6,
};

struct RunOptions {
  std::string subcommand;
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::string out_dir = ".";
  bool check = false;
  int jobs = 1;
  bool brute_force = false;
  bool plots = false;
};

struct SubcommandResult {
  DiagnosticsReport report;
  CsvTable table{{"index"}};
};

const std::vector<std::string>& subcommand_names();
// One line per subcommand describing its CSV columns.
std::string csv_schema_help();

// Pure computation; no files are touched.
SubcommandResult run_subcommand(const std::string& name, const ExperimentConfig& config, int jobs,
                                bool brute_force);

// Loads the config, runs, writes <out>/<subcommand>.csv and .json (and SVGs
// with plots), logs a one-line summary per check and returns an ExitCode.
int run(const RunOptions& options, std::ostream& log);

}  // namespace rwre
