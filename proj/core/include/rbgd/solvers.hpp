#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbgd/bregman.hpp"
#include "rbgd/manifold.hpp"
#include "rbgd/problems.hpp"

namespace rbgd {

enum class Method { R_RBGD, P_RBGD, P_RBGD_C, S_R_RBGD, S_P_RBGD, RSD, RSD_ADA };

const char* to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);
bool is_stochastic(Method method);
bool is_bregman(Method method);

struct SolverConfig {
  Method method = Method::R_RBGD;
  double gamma = 1.0;      ///< gamma_t = gamma for every t
  double rho = 0.5;        ///< linesearch shrink factor
  double alpha0 = 1.0;     ///< first linesearch trial
  double tau = 1.0;        ///< correction bound |u_t| <= tau |v_t| (P_RBGD_C)
  int max_iters = 50000;
  double grad_tol = 1e-4;
  int max_shrinks = 60;
  /// Sufficient-decrease tests accept F(next) - F(x) up to
  /// noise_tol * max(1, |F(x)|) above their bound.
  double noise_tol = 0.0;
  /// Off: every step uses alpha0 without the sufficient-decrease test.
  bool linesearch = true;
  Index batch_size = 1;      ///< stochastic only
  double fixed_alpha = 0.1;  ///< stochastic only
  /// Stochastic only: each batch enumerates the dataset once instead of sampling.
  bool enumerate_batches = false;
  std::uint64_t seed = 0;
  bool record_timing = true;
};

/// Throws InvalidArgument when a field is out of range.
void validate(const SolverConfig& config);

/// State of iterate x_t and the step taken from it. The last record of a
/// converged run has alpha = 0 and describes the final point.
struct IterationRecord {
  int t = 0;
  double f_value = 0.0;
  double g_value = 0.0;
  /// Riemannian gradient norm; null for nonsmooth problems.
  std::optional<double> grad_norm;
  /// |v_t| (deterministic), |zeta_t| (stochastic), |grad| (RSD).
  double direction_norm = 0.0;
  double alpha = 0.0;
  int linesearch_trials = 0;
  std::int64_t wall_ns = 0;
  /// Running mean of |zeta_s|^2 over s <= t (stochastic only).
  std::optional<double> zeta_sq_mean;

  double objective() const { return f_value + g_value; }
};

enum class RunStatus { Converged, MaxIters, LinesearchFailure, NumericalError };

const char* to_string(RunStatus status);

struct RunReport {
  SolverConfig config;
  std::string problem;
  std::string manifold;
  ReferenceKind h = ReferenceKind::Quartic;
  double lambda = 1.0;
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::MaxIters;
  std::string message;
  Matrix final_point;
  double final_feasibility = 0.0;
  /// FNV-1a over the bytes of final_point.
  std::uint64_t final_checksum = 0;
  std::int64_t total_wall_ns = 0;

  /// Iterations taken (number of accepted steps).
  int iterations() const;
  const IterationRecord& last() const { return records.back(); }
};

std::uint64_t checksum(const Matrix& X);

/// R-RBGD with its linesearch; v_t from the tangent-constrained subproblem.
RunReport run_r_rbgd(const Problem& problem, const Manifold& manifold, const ReferenceFunction& h,
                     const ManifoldPoint& x0, const SolverConfig& config);

/// P-RBGD and P-RBGD-C; v_t from the unconstrained subproblem, u_t = 0 or -v_t^N.
RunReport run_p_rbgd(const Problem& problem, const Manifold& manifold, const ReferenceFunction& h,
                     const ManifoldPoint& x0, const SolverConfig& config);

/// S-R-RBGD and S-P-RBGD with a fixed stepsize. Requires a compact manifold.
RunReport run_stochastic(const StochasticProblem& problem, const Manifold& manifold,
                         const ReferenceFunction& h, const ManifoldPoint& x0,
                         const SolverConfig& config);

/** Riemannian steepest descent with Armijo backtracking (constant 1e-4,
 * shrink 0.5). RSD starts each search at twice the previous accepted step;
 * RSD_ADA starts at the previous accepted step and doubles it only when the
 * previous first trial was accepted. The very first trial is
 * alpha0 / |grad f(x_0)|. */
RunReport run_rsd(const Problem& problem, const Manifold& manifold, const ManifoldPoint& x0,
                  const SolverConfig& config);

/// Dispatches on config.method.
RunReport run(const Problem& problem, const Manifold& manifold, const ReferenceFunction& h,
              const ManifoldPoint& x0, const SolverConfig& config);

}  // namespace rbgd
