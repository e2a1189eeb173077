#include "rbgd/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include "rbgd/errors.hpp"

namespace rbgd {

const char* to_string(Method method) {
  switch (method) {
    case Method::R_RBGD: return "R-RBGD";
    case Method::P_RBGD: return "P-RBGD";
    case Method::P_RBGD_C: return "P-RBGD-C";
    case Method::S_R_RBGD: return "S-R-RBGD";
    case Method::S_P_RBGD: return "S-P-RBGD";
    case Method::RSD: return "RSD";
    case Method::RSD_ADA: return "RSD-Ada";
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view name) {
  for (Method m : {Method::R_RBGD, Method::P_RBGD, Method::P_RBGD_C, Method::S_R_RBGD,
                   Method::S_P_RBGD, Method::RSD, Method::RSD_ADA}) {
    std::string canonical = to_string(m);
    if (name.size() != canonical.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size() && same; ++i) {
      const auto a = static_cast<unsigned char>(name[i]);
      const auto b = static_cast<unsigned char>(canonical[i]);
      const auto norm = [](unsigned char ch) {
        return ch == '_' ? '-' : static_cast<char>(std::toupper(ch));
      };
      same = norm(a) == norm(b);
    }
    if (same) return m;
  }
  return std::nullopt;
}

bool is_stochastic(Method method) {
  return method == Method::S_R_RBGD || method == Method::S_P_RBGD;
}

bool is_bregman(Method method) { return method != Method::RSD && method != Method::RSD_ADA; }

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxIters: return "MaxIters";
    case RunStatus::LinesearchFailure: return "LinesearchFailure";
    case RunStatus::NumericalError: return "NumericalError";
  }
  return "unknown";
}

void validate(const SolverConfig& c) {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidArgument, "solver config: " + what);
  };
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) fail("gamma must be positive");
  if (!(c.rho > 0.0 && c.rho < 1.0)) fail("rho must lie in (0, 1)");
  if (!(c.alpha0 > 0.0) || !std::isfinite(c.alpha0)) fail("alpha0 must be positive");
  if (!(c.tau >= 0.0)) fail("tau must be non-negative");
  if (c.max_iters < 0) fail("max_iters must be non-negative");
  if (!(c.grad_tol > 0.0)) fail("grad_tol must be positive");
  if (c.max_shrinks < 0) fail("max_shrinks must be non-negative");
  if (!(c.noise_tol >= 0.0)) fail("noise_tol must be non-negative");
  if (is_stochastic(c.method)) {
    if (c.batch_size < 1) fail("batch_size must be >= 1");
    if (!(c.fixed_alpha > 0.0) || !std::isfinite(c.fixed_alpha)) fail("fixed_alpha must be positive");
  }
}

int RunReport::iterations() const {
  return records.empty() ? 0 : static_cast<int>(records.size()) - 1;
}

std::uint64_t checksum(const Matrix& X) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(X.data());
  const std::size_t n = static_cast<std::size_t>(X.size()) * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(Clock::now()) {}

  std::int64_t elapsed_ns() const {
    if (!enabled_) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_).count();
  }

 private:
  bool enabled_;
  Clock::time_point start_;
};

struct Evaluation {
  double f = 0.0;
  double g = 0.0;
  /// <grad f, feasibility offset> at the point (see objective_change).
  double offset = 0.0;
  /// Euclidean gradient, kept when the offset needed it.
  std::optional<Matrix> grad;
  bool ok = false;

  double F() const { return f + g; }
};

/// f and g at X; a library error or a non-finite value marks the point unusable.
/// With a manifold, also the first-order feasibility correction of f.
Evaluation evaluate(const Problem& problem, const std::optional<NonsmoothTerm>& g,
                    const Matrix& X, const Manifold* manifold = nullptr) {
  Evaluation e;
  try {
    e.f = problem.value(X);
    e.g = g ? g->value(X) : 0.0;
    if (manifold) {
      const Matrix d = manifold->feasibility_offset(X);
      if (!d.isZero(0.0)) {
        e.grad = problem.gradient(X);
        e.offset = e.grad->cwiseProduct(d).sum();
      }
    }
    e.ok = std::isfinite(e.f) && std::isfinite(e.g) && std::isfinite(e.offset);
  } catch (const Error&) {
    e.ok = false;
  }
  return e;
}

/// Euclidean gradient at X, reusing the one the evaluation already holds.
Matrix gradient_at(const Problem& problem, const Evaluation& e, const Matrix& X) {
  return e.grad ? *e.grad : problem.gradient(X);
}

/** F(next) - F(cur) through the problem's cancellation-free difference of f.
 * Both points are moved onto the manifold to first order: retracted points
 * carry an O(eps) feasibility error, and where grad f has a large normal
 * component that error alone shifts f by more than the decrease the
 * linesearch is trying to certify near a stationary point. */
double objective_change(const Problem& problem, const ManifoldPoint& next, const ManifoldPoint& cur,
                        const Evaluation& at_next, const Evaluation& at_cur) {
  const double change = problem.value_change(next.ambient(), cur.ambient()) +
                        (at_next.offset - at_cur.offset) + (at_next.g - at_cur.g);
  if (!std::isfinite(change)) throw Error(ErrorKind::NumericalFailure, "non-finite objective change");
  return change;
}

RunReport start_report(const Problem& problem, const Manifold& manifold, ReferenceKind h,
                       double lambda, const SolverConfig& config) {
  validate(config);
  if (problem.rows() != manifold.rows() || problem.cols() != manifold.cols()) {
    throw Error(ErrorKind::InvalidArgument, "problem and manifold dimensions differ");
  }
  RunReport report;
  report.config = config;
  report.problem = problem.name();
  report.manifold = manifold.name();
  report.h = h;
  report.lambda = lambda;
  return report;
}

void finish(RunReport& report, const Manifold& manifold, const ManifoldPoint& x,
            RunStatus status, std::string message, const Stopwatch& clock) {
  report.status = status;
  report.message = std::move(message);
  report.final_point = x.ambient();
  report.final_feasibility = manifold.feasibility_residual(x.ambient());
  report.final_checksum = checksum(x.ambient());
  report.total_wall_ns = clock.elapsed_ns();
}

std::string describe(const char* stage, int t, const std::exception& e) {
  std::ostringstream out;
  out << stage << " failed at t=" << t << ": " << e.what();
  return out.str();
}

/// Step from x along d with stepsize alpha, by retraction or projection.
ManifoldPoint take_step(const Manifold& M, const ManifoldPoint& x, const Matrix& d, double alpha,
                        bool projection) {
  if (projection) return M.project(x.ambient() + alpha * d);
  return M.retract(x, TangentVector{alpha * d, x.id(), VectorSpace::Tangent});
}

/// Shared loop of R-RBGD and P-RBGD.
RunReport run_bregman(const Problem& problem, const Manifold& M, const ReferenceFunction& h,
                      const ManifoldPoint& x0, const SolverConfig& config, bool projection) {
  RunReport report = start_report(problem, M, h.kind(), h.lambda(), config);
  const Stopwatch clock(config.record_timing);
  const auto g = problem.nonsmooth();
  if (projection && g) {
    throw Error(ErrorKind::InvalidArgument, "projection-based methods need a smooth problem");
  }
  const double gl = config.gamma * h.lambda();

  ManifoldPoint x = x0;
  Evaluation cur = evaluate(problem, g, x.ambient(), &M);
  if (!cur.ok) {
    finish(report, M, x, RunStatus::NumericalError, "objective undefined at x0", clock);
    return report;
  }

  for (int t = 0;; ++t) {
    IterationRecord rec;
    rec.t = t;
    rec.f_value = cur.f;
    rec.g_value = cur.g;

    Matrix v;
    try {
      const Matrix egrad = gradient_at(problem, cur, x.ambient());
      if (!g) rec.grad_norm = M.project_tangent(x, egrad).norm();
      SubproblemSpec spec{M, x, egrad, config.gamma, h, g, !projection};
      v = solve_subproblem(spec).direction.ambient;
    } catch (const Error& e) {
      rec.wall_ns = clock.elapsed_ns();
      report.records.push_back(rec);
      finish(report, M, x, RunStatus::NumericalError, describe("subproblem", t, e), clock);
      return report;
    }
    const double vnorm = v.norm();
    rec.direction_norm = vnorm;

    const bool stationary = g ? vnorm <= config.grad_tol : *rec.grad_norm <= config.grad_tol;
    if (stationary || t >= config.max_iters) {
      rec.wall_ns = clock.elapsed_ns();
      report.records.push_back(rec);
      finish(report, M, x, stationary ? RunStatus::Converged : RunStatus::MaxIters, "", clock);
      return report;
    }

    Matrix d = v;
    if (config.method == Method::P_RBGD_C) {
      Matrix u = -M.project_normal(x, v).ambient;
      const double unorm = u.norm();
      const double bound = config.tau * vnorm;
      if (unorm > bound) u *= bound / unorm;
      d += u;
    }

    double alpha = config.alpha0;
    int trials = 0;
    std::optional<ManifoldPoint> next;
    Evaluation cand;
    for (;;) {
      ++trials;
      cand.ok = false;
      double change = 0.0;
      try {
        next = take_step(M, x, d, alpha, projection);
        cand = evaluate(problem, g, next->ambient(), &M);
        if (cand.ok) change = objective_change(problem, *next, x, cand, cur);
      } catch (const Error&) {
        cand.ok = false;
      }
      const double slack = config.noise_tol * std::max(1.0, std::abs(cur.F()));
      if (cand.ok &&
          (!config.linesearch || change <= -(gl * alpha / 4.0) * vnorm * vnorm + slack)) {
        break;
      }
      if (!config.linesearch || trials > config.max_shrinks) {
        rec.linesearch_trials = trials;
        rec.wall_ns = clock.elapsed_ns();
        report.records.push_back(rec);
        const RunStatus status =
            config.linesearch ? RunStatus::LinesearchFailure : RunStatus::NumericalError;
        std::ostringstream msg;
        msg << (config.linesearch ? "linesearch exhausted" : "fixed step left the domain")
            << " at t=" << t;
        finish(report, M, x, status, msg.str(), clock);
        return report;
      }
      alpha *= config.rho;
    }

    rec.alpha = alpha;
    rec.linesearch_trials = trials;
    rec.wall_ns = clock.elapsed_ns();
    report.records.push_back(rec);
    x = *next;
    cur = cand;
  }
}

}  // namespace

RunReport run_r_rbgd(const Problem& problem, const Manifold& manifold, const ReferenceFunction& h,
                     const ManifoldPoint& x0, const SolverConfig& config) {
  return run_bregman(problem, manifold, h, x0, config, false);
}

RunReport run_p_rbgd(const Problem& problem, const Manifold& manifold, const ReferenceFunction& h,
                     const ManifoldPoint& x0, const SolverConfig& config) {
  return run_bregman(problem, manifold, h, x0, config, true);
}

RunReport run_stochastic(const StochasticProblem& problem, const Manifold& M,
                         const ReferenceFunction& h, const ManifoldPoint& x0,
                         const SolverConfig& config) {
  if (!is_stochastic(config.method)) {
    throw Error(ErrorKind::InvalidArgument, "run_stochastic: method is not stochastic");
  }
  if (!M.compact()) {
    throw Error(ErrorKind::InvalidArgument,
                "stochastic methods require a compact manifold, got " + M.name());
  }
  RunReport report = start_report(problem, M, h.kind(), h.lambda(), config);
  const Stopwatch clock(config.record_timing);
  const bool projection = config.method == Method::S_P_RBGD;
  const auto g = problem.nonsmooth();
  if (projection && g) {
    throw Error(ErrorKind::InvalidArgument, "projection-based methods need a smooth problem");
  }
  MinibatchOracle oracle(problem, Rng(config.seed).fork(0x5eed));

  ManifoldPoint x = x0;
  Evaluation cur = evaluate(problem, g, x.ambient());
  if (!cur.ok) {
    finish(report, M, x, RunStatus::NumericalError, "objective undefined at x0", clock);
    return report;
  }
  double zeta_sq_sum = 0.0;

  for (int t = 0;; ++t) {
    IterationRecord rec;
    rec.t = t;
    rec.f_value = cur.f;
    rec.g_value = cur.g;
    Matrix zeta;
    try {
      const Matrix egrad = problem.gradient(x.ambient());
      if (!g) rec.grad_norm = M.project_tangent(x, egrad).norm();
      if (!g && *rec.grad_norm <= config.grad_tol) {
        rec.zeta_sq_mean = t > 0 ? std::optional<double>(zeta_sq_sum / t) : std::nullopt;
        rec.wall_ns = clock.elapsed_ns();
        report.records.push_back(rec);
        finish(report, M, x, RunStatus::Converged, "", clock);
        return report;
      }
      if (t >= config.max_iters) {
        rec.zeta_sq_mean = t > 0 ? std::optional<double>(zeta_sq_sum / t) : std::nullopt;
        rec.wall_ns = clock.elapsed_ns();
        report.records.push_back(rec);
        finish(report, M, x, RunStatus::MaxIters, "", clock);
        return report;
      }
      const Matrix batch_grad = config.enumerate_batches
                                    ? oracle.enumerate(x.ambient())
                                    : oracle.gradient(x.ambient(), config.batch_size);
      SubproblemSpec spec{M, x, batch_grad, config.gamma, h, g, !projection};
      zeta = solve_subproblem(spec).direction.ambient;
    } catch (const Error& e) {
      rec.wall_ns = clock.elapsed_ns();
      report.records.push_back(rec);
      finish(report, M, x, RunStatus::NumericalError, describe("subproblem", t, e), clock);
      return report;
    }
    const double znorm = zeta.norm();
    zeta_sq_sum += znorm * znorm;
    rec.direction_norm = znorm;
    rec.zeta_sq_mean = zeta_sq_sum / (t + 1);
    rec.alpha = config.fixed_alpha;
    rec.linesearch_trials = 1;

    Evaluation cand;
    std::optional<ManifoldPoint> next;
    try {
      next = take_step(M, x, zeta, config.fixed_alpha, projection);
      cand = evaluate(problem, g, next->ambient());
    } catch (const Error&) {
      cand.ok = false;
    }
    if (!cand.ok) {
      rec.alpha = 0.0;
      rec.wall_ns = clock.elapsed_ns();
      report.records.push_back(rec);
      std::ostringstream msg;
      msg << "fixed step left the domain at t=" << t;
      finish(report, M, x, RunStatus::NumericalError, msg.str(), clock);
      return report;
    }
    rec.wall_ns = clock.elapsed_ns();
    report.records.push_back(rec);
    x = *next;
    cur = cand;
  }
}

RunReport run_rsd(const Problem& problem, const Manifold& M, const ManifoldPoint& x0,
                  const SolverConfig& config) {
  if (config.method != Method::RSD && config.method != Method::RSD_ADA) {
    throw Error(ErrorKind::InvalidArgument, "run_rsd: method is not RSD or RSD-Ada");
  }
  if (problem.nonsmooth()) {
    throw Error(ErrorKind::InvalidArgument, "steepest descent needs a smooth problem");
  }
  const ReferenceFunction euclid = ReferenceFunction::quadratic();
  RunReport report = start_report(problem, M, euclid.kind(), euclid.lambda(), config);
  const Stopwatch clock(config.record_timing);
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  const bool adaptive = config.method == Method::RSD_ADA;

  ManifoldPoint x = x0;
  Evaluation cur = evaluate(problem, std::nullopt, x.ambient(), &M);
  if (!cur.ok) {
    finish(report, M, x, RunStatus::NumericalError, "objective undefined at x0", clock);
    return report;
  }
  double previous_alpha = 0.0;
  bool previous_first_accepted = false;

  for (int t = 0;; ++t) {
    IterationRecord rec;
    rec.t = t;
    rec.f_value = cur.f;
    Matrix rgrad;
    try {
      rgrad = M.project_tangent(x, gradient_at(problem, cur, x.ambient())).ambient;
    } catch (const Error& e) {
      rec.wall_ns = clock.elapsed_ns();
      report.records.push_back(rec);
      finish(report, M, x, RunStatus::NumericalError, describe("gradient", t, e), clock);
      return report;
    }
    const double gnorm = rgrad.norm();
    rec.grad_norm = gnorm;
    rec.direction_norm = gnorm;
    if (gnorm <= config.grad_tol || t >= config.max_iters) {
      rec.wall_ns = clock.elapsed_ns();
      report.records.push_back(rec);
      finish(report, M, x, gnorm <= config.grad_tol ? RunStatus::Converged : RunStatus::MaxIters,
             "", clock);
      return report;
    }

    double alpha;
    if (t == 0) {
      alpha = config.alpha0 / gnorm;
    } else if (adaptive) {
      alpha = previous_first_accepted ? 2.0 * previous_alpha : previous_alpha;
    } else {
      alpha = 2.0 * previous_alpha;
    }

    int trials = 0;
    std::optional<ManifoldPoint> next;
    Evaluation cand;
    for (;;) {
      ++trials;
      cand.ok = false;
      double change = 0.0;
      try {
        next = take_step(M, x, -rgrad, alpha, false);
        cand = evaluate(problem, std::nullopt, next->ambient(), &M);
        if (cand.ok) change = objective_change(problem, *next, x, cand, cur);
      } catch (const Error&) {
        cand.ok = false;
      }
      const double slack = config.noise_tol * std::max(1.0, std::abs(cur.F()));
      if (cand.ok && change <= -kArmijo * alpha * gnorm * gnorm + slack) break;
      if (trials > config.max_shrinks) {
        rec.linesearch_trials = trials;
        rec.wall_ns = clock.elapsed_ns();
        report.records.push_back(rec);
        std::ostringstream msg;
        msg << "linesearch exhausted at t=" << t;
        finish(report, M, x, RunStatus::LinesearchFailure, msg.str(), clock);
        return report;
      }
      alpha *= kShrink;
    }
    previous_alpha = alpha;
    previous_first_accepted = trials == 1;

    rec.alpha = alpha;
    rec.linesearch_trials = trials;
    rec.wall_ns = clock.elapsed_ns();
    report.records.push_back(rec);
    x = *next;
    cur = cand;
  }
}

RunReport run(const Problem& problem, const Manifold& manifold, const ReferenceFunction& h,
              const ManifoldPoint& x0, const SolverConfig& config) {
  switch (config.method) {
    case Method::R_RBGD:
      return run_r_rbgd(problem, manifold, h, x0, config);
    case Method::P_RBGD:
    case Method::P_RBGD_C:
      return run_p_rbgd(problem, manifold, h, x0, config);
    case Method::S_R_RBGD:
    case Method::S_P_RBGD: {
      const auto* stochastic = dynamic_cast<const StochasticProblem*>(&problem);
      if (!stochastic) {
        throw Error(ErrorKind::InvalidArgument,
                    "stochastic methods need a problem with a minibatch oracle");
      }
      return run_stochastic(*stochastic, manifold, h, x0, config);
    }
    case Method::RSD:
    case Method::RSD_ADA:
      return run_rsd(problem, manifold, x0, config);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method");
}

}  // namespace rbgd
