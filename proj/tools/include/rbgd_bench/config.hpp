#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <rbgd/bregman.hpp>
#include <rbgd/manifold.hpp>
#include <rbgd/problems.hpp>
#include <rbgd/solvers.hpp>

namespace rbgd::bench {

/// Malformed or invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Nepv;
  Index m = 0;
  Index p = 0;  ///< p (nepv) or r (sensing)
  double beta = 10.0;
  Index N = 100;
  /// Stiefel for nepv; fixed-rank (default) or sphere for sensing.
  ManifoldKind manifold = ManifoldKind::Stiefel;
};

struct MethodSpec {
  std::string label;
  SolverConfig solver;
  ReferenceKind h = ReferenceKind::Quartic;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "rbgd-out";
  /// Worker threads; 0 means one per hardware thread.
  int jobs = 0;
  bool record_timing = true;
};

/// Published experiment defaults for a method on a problem family.
SolverConfig default_solver(ProblemKind kind, Method method);

/// Builds a config from the JSON data model shared by both file formats.
ExperimentConfig config_from_json(const nlohmann::json& doc);
/// Parses TOML (subset) or JSON text; JSON is detected by a leading '{'.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError on any invariant violation, before anything runs.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace rbgd::bench
