#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbgd_bench/config.hpp"
#include "rbgd_bench/reference.hpp"
#include "rbgd_bench/runner.hpp"

namespace rbgd::bench {

struct ReproduceOptions {
  Experiment experiment = Experiment::Table2;
  Scale scale = Scale::Desk;
  bool record_timing = true;
  int jobs = 0;
  /// Replaces the default seeds (1..3 for the tables, 1..10 for sensing).
  std::optional<std::vector<std::uint64_t>> seeds;
  std::filesystem::path output_dir = "rbgd-reproduce";
};

/// Relative tolerance on Fval against the published value.
inline constexpr double kFvalRelTol = 1e-3;
/// Table 1 iteration counts must lie within [ref / 3, 3 ref].
inline constexpr double kIterBand = 3.0;
inline constexpr double kGradTol = 1e-4;
/// Sensing: final f relative to f(x_0).
inline constexpr double kSensingDecrease = 1e-6;
/// Sensing: share of seeds on which P-RBGD needs no more iterations than RSD.
inline constexpr double kSensingOrderShare = 0.7;

/// Experiment config for one grid cell of a reproduction.
ExperimentConfig reproduce_config(const ReproduceOptions& options, const GridCell& cell);

struct Check {
  std::string what;
  std::string observed;
  std::string expected;
  bool pass = false;
  /// Logged for comparison, never fails.
  bool info = false;
};

/// Side-by-side checks of one finished grid cell against the published values.
std::vector<Check> compare(Experiment experiment, const ComparisonReport& report);

/// Runs the grid, writes every cell's outputs, prints the comparison.
/// Returns 0 when every run produced a report and every check passed, 1 otherwise.
int reproduce(const ReproduceOptions& options, std::ostream& out);

}  // namespace rbgd::bench
