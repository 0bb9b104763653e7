// Experiment runner for the oriented-percolation / contact-process library.
//
//   opre <subcommand> [--config PATH] [--seed N] [--reps N] [--workers N]
//        [--out PATH] [--format csv|json]
//
// Subcommands: percolate, crossing, blocks, contact, couple, temporal,
// kernel-audit, acceptance. Flags override the config file; OPRE_SEED is the
// seed fallback. Exit codes: 0 ok, 1 validation error, 2 runtime error,
// 3 acceptance-check failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opre/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"oriented percolation in random environments - experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t reps = 0;
  int workers = 0;

  const std::vector<std::string> subcommands{"percolate", "crossing", "blocks",  "contact",
                                             "couple",    "temporal", "kernel-audit", "acceptance"};
  for (const auto& name : subcommands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--seed", seed, "master seed (fallback: OPRE_SEED env var)")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--reps", reps, "replication count");
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string chosen = app.get_subcommands().front()->get_name();

  opre::json raw = opre::json::object();
  opre::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "config error: cannot open " << config_path << "\n";
        return 1;
      }
      in >> raw;
      raw["experiment"] = chosen;
      cfg = opre::parse_config(raw);
    } else {
      raw["experiment"] = chosen;
      cfg = opre::parse_config(raw);
    }
    if (seed_set) cfg.seed = seed;
    else if (!raw.contains("seed")) {
      if (const char* env = std::getenv("OPRE_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
    }
    if (reps > 0) cfg.reps = reps;
    if (workers > 0) cfg.workers = workers;
    if (!out_path.empty()) cfg.out = out_path;
    if (!format.empty()) {
      if (format != "csv" && format != "json") {
        std::cerr << "config error: --format must be csv or json\n";
        return 1;
      }
      cfg.format = format;
    }
    raw["seed"] = cfg.seed;
    raw["reps"] = cfg.reps;
  } catch (const opre::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return opre::run_experiment_main(cfg, raw);
}
