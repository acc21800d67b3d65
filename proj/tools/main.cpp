#include <algorithm>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rwre/runner.hpp"

namespace {

const char* describe(const std::string& name) {
  if (name == "blocks") return "sample regeneration blocks; speed, covariance and T1 tail";
  if (name == "simulate") return "blocks plus direct runs; LLN and CLT cross-checks";
  if (name == "renorm") return "fall-on-trap bound on fixed realizations";
  if (name == "mj") return "minimum threats over allowed paths on random instances";
  if (name == "akh") return "probability of a path with fewer than k^2 threats";
  if (name == "decouple") return "covariance battery and truncation error";
  if (name == "rmp-test") return "conditional independence across the apex";
  if (name == "qk") return "vertical gap probabilities q_k";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks in dynamic random environments: regeneration, renormalization and "
               "environment diagnostics."};
  app.footer(rwre::csv_schema_help() +
             "\nExit codes: 0 ok, 2 invalid config or arguments, 3 --check failed, 4 unknown subcommand,\n"
             "5 resource error, 6 sampler diagnostics error, 1 internal error.");
  app.require_subcommand(1);

  rwre::RunOptions opts;
  std::uint64_t seed = 0;
  for (const auto& name : rwre::subcommand_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", opts.config_path, "experiment config file (key = value)")->required();
    sub->add_option("--seed", seed, "master seed; overrides the config's seed key");
    sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    sub->add_flag("--check", opts.check, "exit 3 when an acceptance check fails");
    sub->add_option("--jobs", opts.jobs, "worker threads")->capture_default_str();
    sub->add_flag("--brute-force", opts.brute_force, "mj: compare against exhaustive enumeration");
    sub->add_flag("--plots", opts.plots, "write SVG figures next to the JSON summary");
    sub->callback([&, name, sub] {
      opts.subcommand = name;
      if (sub->count("--seed") > 0) opts.seed = seed;
    });
  }

  if (argc >= 2 && argv[1][0] != '-') {
    const auto& names = rwre::subcommand_names();
    if (std::find(names.begin(), names.end(), argv[1]) == names.end()) {
      std::cerr << "unknown subcommand '" << argv[1] << "'\nRun with --help for more information.\n";
      return rwre::kExitUnknownSubcommand;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    app.exit(e);
    return rwre::kExitUnknownSubcommand;
  } catch (const CLI::RequiredError& e) {
    // A missing subcommand or missing --config.
    app.exit(e);
    return argc < 2 ? rwre::kExitUnknownSubcommand : rwre::kExitInvalidConfig;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rwre::kExitInvalidConfig;
  }
  return rwre::run(opts, std::cerr);
}
