#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "rbgd_bench/config.hpp"
#include "rbgd_bench/reproduce.hpp"
#include "rbgd_bench/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::string out;
  std::vector<std::uint64_t> seeds;
  int jobs = -1;
  bool no_timing = false;
};

int cmd_run(const std::string& path, const GlobalOptions& global) {
  using namespace rbgd::bench;
  ExperimentConfig config;
  try {
    config = load_config(path);
    if (!global.seeds.empty()) config.seeds = global.seeds;
    if (!global.out.empty()) config.output_dir = global.out;
    if (global.jobs >= 0) config.jobs = global.jobs;
    if (global.no_timing) config.record_timing = false;
    validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "rbgd-bench: " << path << ": " << e.what() << "\n";
    return kExitUsage;
  }
  ComparisonReport report = run_experiment(config);
  write_outputs(report);
  std::cout << format_table(report) << "outputs: " << config.output_dir.string() << "\n";
  return report.all_converged() ? kExitOk : kExitRunFailure;
}

int cmd_reproduce(const std::string& name, const std::string& scale, const GlobalOptions& global) {
  using namespace rbgd::bench;
  const auto experiment = experiment_from_string(name);
  if (!experiment) {
    std::cerr << "rbgd-bench: unknown experiment '" << name
              << "' (expected table1, table2 or fig-sensing)\n";
    return kExitUsage;
  }
  ReproduceOptions options;
  options.experiment = *experiment;
  options.scale = scale == "paper" ? Scale::Paper : Scale::Desk;
  options.record_timing = !global.no_timing;
  if (global.jobs >= 0) options.jobs = global.jobs;
  if (!global.seeds.empty()) options.seeds = global.seeds;
  if (!global.out.empty()) options.output_dir = global.out;
  try {
    return reproduce(options, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "rbgd-bench: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian Bregman gradient methods: experiment runner"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--out", global.out, "Output directory (overrides the config)");
  app.add_option("--seed-override", global.seeds, "Comma-separated seeds replacing the configured ones")
      ->delimiter(',');
  app.add_option("--jobs", global.jobs, "Worker threads (0: one per CPU)")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-timing", global.no_timing, "Record wall_ns as 0 for byte-reproducible CSVs");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every (method, seed) cell of a config file");
  run->add_option("config", config_path, "TOML or JSON experiment config")->required();

  std::string experiment;
  std::string scale = "desk";
  auto* repro = app.add_subcommand("reproduce", "Re-run a published experiment grid");
  repro->add_option("experiment", experiment, "table1, table2 or fig-sensing")->required();
  repro->add_option("--scale", scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, global);
    return cmd_reproduce(experiment, scale, global);
  } catch (const std::exception& e) {
    std::cerr << "rbgd-bench: " << e.what() << "\n";
    return kExitRunFailure;
  }
}
