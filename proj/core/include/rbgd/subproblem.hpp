#pragma once

#include <optional>

#include "rbgd/bregman.hpp"
#include "rbgd/manifold.hpp"

namespace rbgd {

enum class NonsmoothKind { L1 };

/// Convex nonsmooth term g with a closed-form proximal map.
struct NonsmoothTerm {
  NonsmoothKind kind = NonsmoothKind::L1;
  double weight = 0.0;  ///< mu in g(x) = mu * |x|_1

  static NonsmoothTerm l1(double mu);

  double value(const Matrix& x) const;
  /// argmin_u g(u) + |u - z|^2 / (2 t)
  Matrix prox(const Matrix& z, double t) const;
  /// Lipschitz constant of g on R^n.
  double lipschitz(Index n) const;
};

/** One Bregman step subproblem at a base point x:
 *
 *   constrained:    min_{v in T_x M} <grad f(x), v> + gamma D_h(x + v, x) + g(x + v)
 *   unconstrained:  min_{v in R^n}   <P_T grad f(x), v> + gamma D_h(x + v, x)
 *
 * All closed forms work with c = grad f(x) / gamma - grad h(x). */
struct SubproblemSpec {
  const Manifold& manifold;
  const ManifoldPoint& base;
  Matrix euclid_grad;
  double gamma = 1.0;
  ReferenceFunction h = ReferenceFunction::quartic();
  std::optional<NonsmoothTerm> g;
  bool constrained = true;
};

enum class SubproblemMethod {
  QuarticClosedForm,
  QuadraticClosedForm,
  SphereScalarRoot,
  Splitting,
  UnconstrainedClosedForm,
  UnconstrainedNewton,
};

const char* to_string(SubproblemMethod method);

struct SubproblemSolution {
  /// Tangent at the base for constrained solves, Ambient otherwise.
  TangentVector direction;
  /// First-order optimality residual in c units (divided by gamma).
  double kkt_residual = 0.0;
  SubproblemMethod solver_used = SubproblemMethod::QuarticClosedForm;
  int inner_iterations = 0;
};

struct SplittingOptions {
  int max_iterations = 10000;
  /// Primal and dual residuals must fall below tol * max(1, |x|).
  double tolerance = 1e-8;
};

/// Closed form for the quartic reference, g absent.
SubproblemSolution solve_quartic_tangent(const SubproblemSpec& spec);

/// Sphere with log-barrier or entropy reference, g absent: one scalar root.
SubproblemSolution solve_sphere_scalar(const SubproblemSpec& spec);

/// ADMM splitting z = x + v for any strongly convex h and l1 g. Throws
/// InexactSolveError when the iteration cap is reached.
SubproblemSolution solve_generic_constrained(const SubproblemSpec& spec,
                                             const SplittingOptions& options = {});

/// Unconstrained step used by the projection-based methods.
SubproblemSolution solve_unconstrained(const SubproblemSpec& spec);

/// Cheapest exact method first: quartic / quadratic closed form, then the
/// sphere scalar root, then splitting.
SubproblemSolution solve_constrained(const SubproblemSpec& spec);

/// Dispatches on spec.constrained.
SubproblemSolution solve_subproblem(const SubproblemSpec& spec);

/// Objective of the constrained subproblem at direction v (value 0 at v = 0).
double subproblem_objective(const SubproblemSpec& spec, const Matrix& v);

}  // namespace rbgd
