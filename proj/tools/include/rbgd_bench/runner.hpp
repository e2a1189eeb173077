#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <rbgd/solvers.hpp>

#include "rbgd_bench/config.hpp"

namespace rbgd::bench {

/// Problem, manifold and starting point of one (method, seed) cell.
struct CellSetup {
  std::unique_ptr<Problem> problem;
  std::unique_ptr<Manifold> manifold;
  std::optional<ManifoldPoint> x0;
};

/// Sensing data comes from Rng(seed).fork(1) and x0 from Rng(seed).fork(2);
/// the NEPv instance itself does not depend on the seed.
CellSetup make_cell(const ProblemSpec& problem, std::uint64_t seed);

struct CellResult {
  std::size_t method_index = 0;
  std::string label;
  std::uint64_t seed = 0;
  /// Empty when the run threw before producing a report.
  std::optional<RunReport> report;
  std::string error;
  double initial_objective = 0.0;
  std::filesystem::path csv_path;

  bool converged() const { return report && report->status == RunStatus::Converged; }
};

/// One line of the cross-method table (means over the seeds that produced a report).
struct TableRow {
  std::string label;
  double fval = 0.0;
  std::optional<double> grad_norm;
  double iterations = 0.0;
  double seconds = 0.0;
  int converged = 0;
  int failed = 0;
};

struct ComparisonReport {
  ExperimentConfig config;
  /// Ordered by (method index, seed) regardless of completion order.
  std::vector<CellResult> cells;

  std::vector<TableRow> table() const;
  bool all_converged() const;
};

/// Runs one cell; exceptions become a failed CellResult.
CellResult run_cell(const ExperimentConfig& config, std::size_t method_index, std::uint64_t seed);

/// Runs every (method, seed) cell on a bounded pool of worker threads.
ComparisonReport run_experiment(const ExperimentConfig& config);

/// Header plus one row per record: t,F,grad_norm,v_norm,alpha,ls_trials,wall_ns.
std::string iteration_csv(const RunReport& report);

nlohmann::json to_json(const ComparisonReport& report);
std::string format_table(const ComparisonReport& report);

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Per-cell CSVs, report.json and report.txt under config.output_dir.
/// Fills in CellResult::csv_path.
void write_outputs(ComparisonReport& report);

/// File-name-safe version of a method label.
std::string slug(std::string_view label);

int worker_count(int requested, std::size_t cells);

}  // namespace rbgd::bench
