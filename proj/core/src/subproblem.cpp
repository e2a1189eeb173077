#include "rbgd/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rbgd/errors.hpp"

namespace rbgd {

const char* to_string(SubproblemMethod method) {
  switch (method) {
    case SubproblemMethod::QuarticClosedForm: return "quartic_closed_form";
    case SubproblemMethod::QuadraticClosedForm: return "quadratic_closed_form";
    case SubproblemMethod::SphereScalarRoot: return "sphere_scalar_root";
    case SubproblemMethod::Splitting: return "splitting";
    case SubproblemMethod::UnconstrainedClosedForm: return "unconstrained_closed_form";
    case SubproblemMethod::UnconstrainedNewton: return "unconstrained_newton";
  }
  return "unknown";
}

NonsmoothTerm NonsmoothTerm::l1(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::InvalidArgument, "l1 weight must be finite and non-negative");
  }
  return NonsmoothTerm{NonsmoothKind::L1, mu};
}

double NonsmoothTerm::value(const Matrix& x) const { return weight * x.lpNorm<1>(); }

Matrix NonsmoothTerm::prox(const Matrix& z, double t) const {
  const double k = weight * t;
  return (z.array().sign() * (z.array().abs() - k).max(0.0)).matrix();
}

double NonsmoothTerm::lipschitz(Index n) const {
  return weight * std::sqrt(static_cast<double>(n));
}

namespace {

double dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

void validate(const SubproblemSpec& spec) {
  if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma)) {
    throw Error(ErrorKind::InvalidArgument, "subproblem: gamma must be positive");
  }
  if (spec.g && !spec.constrained) {
    throw Error(ErrorKind::InvalidArgument,
                "subproblem: a nonsmooth term requires the tangent-constrained form");
  }
  if (spec.euclid_grad.rows() != spec.manifold.rows() ||
      spec.euclid_grad.cols() != spec.manifold.cols()) {
    throw Error(ErrorKind::InvalidArgument, "subproblem: gradient shape mismatch");
  }
  if (!spec.euclid_grad.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "subproblem: gradient has non-finite entries");
  }
}

/// c = grad f / gamma - grad h(x)
Matrix linear_coefficient(const SubproblemSpec& spec) {
  return spec.euclid_grad / spec.gamma - spec.h.gradient(spec.base.ambient());
}

/// |P_T(c + grad h(x + v) + s / gamma)| + |P_N(v)|, with s a subgradient of g.
double constrained_residual(const SubproblemSpec& spec, const Matrix& c, const Matrix& v,
                            const Matrix* subgradient) {
  const Matrix& x = spec.base.ambient();
  Matrix r = c + spec.h.gradient(x + v);
  if (subgradient) r += *subgradient / spec.gamma;
  const double stationarity = spec.manifold.project_tangent(spec.base, r).norm();
  const double tangency = spec.manifold.project_normal(spec.base, v).norm();
  return stationarity + tangency;
}

TangentVector tangent(const SubproblemSpec& spec, Matrix v) {
  return TangentVector{std::move(v), spec.base.id(), VectorSpace::Tangent};
}

/** Damped Newton on a strongly convex objective restricted to T_x M:
 *
 *   phi(v) = <a, v> + gamma h(x + v) + rho/2 |x + v - z|^2
 *
 * Newton systems are solved by conjugate gradients on the tangent space. */
class TangentNewton {
 public:
  TangentNewton(const SubproblemSpec& spec, Matrix a, double rho, Matrix z)
      : spec_(spec), a_(std::move(a)), rho_(rho), z_(std::move(z)) {}

  Matrix solve(Matrix v, int& iterations) const {
    const Matrix& x = spec_.base.ambient();
    const double scale = std::max({1.0, a_.norm(), spec_.gamma * x.norm()});
    for (int k = 0; k < 100; ++k) {
      const Matrix G = projected_gradient(v);
      const double gnorm = G.norm();
      if (gnorm <= 1e-13 * scale) return v;
      const Matrix d = conjugate_gradient(v, -G);
      const double slope = dot(G, d);
      const double phi0 = objective(v);
      double t = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        const Matrix trial = v + t * d;
        if (!spec_.h.in_domain(x + trial)) continue;
        if (objective(trial) <= phi0 + 1e-4 * t * slope) {
          v = trial;
          accepted = true;
          break;
        }
      }
      ++iterations;
      if (!accepted) {
        // No progress is possible at working precision.
        if (gnorm <= 1e-9 * scale) return v;
        throw InexactSolveError(gnorm, 0.0, "tangent Newton: linesearch stalled");
      }
    }
    const double gnorm = projected_gradient(v).norm();
    if (gnorm <= 1e-9 * scale) return v;
    throw InexactSolveError(gnorm, 0.0, "tangent Newton: iteration cap reached");
  }

 private:
  double objective(const Matrix& v) const {
    const Matrix w = spec_.base.ambient() + v;
    return dot(a_, v) + spec_.gamma * spec_.h.value(w) + 0.5 * rho_ * (w - z_).squaredNorm();
  }

  Matrix projected_gradient(const Matrix& v) const {
    const Matrix w = spec_.base.ambient() + v;
    const Matrix g = a_ + spec_.gamma * spec_.h.gradient(w) + rho_ * (w - z_);
    return spec_.manifold.project_tangent(spec_.base, g).ambient;
  }

  Matrix hessian(const Matrix& v, const Matrix& d) const {
    const Matrix w = spec_.base.ambient() + v;
    const Matrix hd = spec_.gamma * spec_.h.hessian_apply(w, d) + rho_ * d;
    return spec_.manifold.project_tangent(spec_.base, hd).ambient;
  }

  Matrix conjugate_gradient(const Matrix& v, const Matrix& rhs) const {
    Matrix sol = Matrix::Zero(rhs.rows(), rhs.cols());
    Matrix r = rhs;
    Matrix p = r;
    double rr = r.squaredNorm();
    const double stop = 1e-28 * rr;
    for (Index k = 0; k < rhs.size() && rr > stop; ++k) {
      const Matrix Hp = hessian(v, p);
      const double curvature = dot(p, Hp);
      if (!(curvature > 0.0)) break;
      const double step = rr / curvature;
      sol += step * p;
      r -= step * Hp;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
    return sol;
  }

  const SubproblemSpec& spec_;
  Matrix a_;
  double rho_;
  Matrix z_;
};

}  // namespace

double subproblem_objective(const SubproblemSpec& spec, const Matrix& v) {
  const Matrix& x = spec.base.ambient();
  const Matrix linear = spec.constrained
                            ? spec.euclid_grad
                            : spec.manifold.project_tangent(spec.base, spec.euclid_grad).ambient;
  double value = dot(linear, v) + spec.gamma * bregman(spec.h, x + v, x).value;
  if (spec.g) value += spec.g->value(x + v) - spec.g->value(x);
  return value;
}

SubproblemSolution solve_quartic_tangent(const SubproblemSpec& spec) {
  validate(spec);
  if (spec.h.kind() != ReferenceKind::Quartic || spec.g || !spec.constrained) {
    throw Error(ErrorKind::InvalidArgument,
                "solve_quartic_tangent: needs quartic h, no g, tangent constraint");
  }
  const Matrix& x = spec.base.ambient();
  const Matrix c = linear_coefficient(spec);
  const Matrix Pc = spec.manifold.project_tangent(spec.base, c).ambient;
  const Matrix Px = spec.manifold.project_tangent(spec.base, x).ambient;

  Matrix v;
  const double pc_norm = Pc.norm();
  if (pc_norm <= kTolerances.degenerate_tangent * std::max(1.0, c.norm())) {
    v = -Px;
  } else {
    const double normal_sq = (x - Px).squaredNorm();
    const double theta = positive_cubic_root(pc_norm * pc_norm, normal_sq + 1.0);
    v = -theta * Pc - Px;
  }
  const double kkt = constrained_residual(spec, c, v, nullptr);
  return SubproblemSolution{tangent(spec, std::move(v)), kkt,
                            SubproblemMethod::QuarticClosedForm, 0};
}

SubproblemSolution solve_sphere_scalar(const SubproblemSpec& spec) {
  validate(spec);
  const ReferenceKind kind = spec.h.kind();
  if (spec.manifold.kind() != ManifoldKind::Sphere || spec.g || !spec.constrained ||
      (kind != ReferenceKind::LogBarrier && kind != ReferenceKind::Entropy)) {
    throw Error(ErrorKind::InvalidArgument,
                "solve_sphere_scalar: needs sphere, log_barrier/entropy h, no g");
  }
  const Matrix& x = spec.base.ambient();
  if (!(x.array() > 0.0).all()) {
    throw Error(ErrorKind::InvalidArgument, "solve_sphere_scalar: base point must be positive");
  }
  const Matrix c = linear_coefficient(spec);
  const auto xs = x.reshaped();
  const auto cs = c.reshaped();
  const Index n = x.size();

  Matrix v;
  if (kind == ReferenceKind::LogBarrier) {
    // psi(l) = sum x_i / (c_i + l x_i) - 1 decreases from +inf on (l_min, inf).
    double l_min = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) l_min = std::max(l_min, -cs(i) / xs(i));
    const double scale = std::max(1.0, std::abs(l_min));
    const auto psi = [&](double l) {
      double sum = 0.0;
      for (Index i = 0; i < n; ++i) sum += xs(i) / (cs(i) + l * xs(i));
      return sum - 1.0;
    };
    double lo = l_min + 1e-12 * scale;
    while (!(psi(lo) > 0.0)) lo = l_min + 0.5 * (lo - l_min);
    const double root = bracketed_scalar_root(psi, lo, lo + scale, 1e-16);
    const Matrix denom = c + root * x;
    for (Index i = 0; i < n; ++i) {
      if (!(denom.reshaped()(i) > 0.0)) {
        std::ostringstream msg;
        msg << "solve_sphere_scalar: c_" << i << " + lambda x_" << i
            << " <= 0 leaves the barrier domain";
        throw Error(ErrorKind::InfeasibleSubproblem, msg.str());
      }
    }
    v = denom.array().inverse().matrix() - x;
  } else {
    // log sum_i x_i exp(-c_i - l x_i - 1) decreases from +inf to -inf.
    const auto psi = [&](double l) {
      double top = -std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i) top = std::max(top, std::log(xs(i)) - cs(i) - l * xs(i) - 1.0);
      double sum = 0.0;
      for (Index i = 0; i < n; ++i) sum += std::exp(std::log(xs(i)) - cs(i) - l * xs(i) - 1.0 - top);
      return top + std::log(sum);
    };
    Index j = 0;
    xs.maxCoeff(&j);
    // At this lambda the j-th term alone equals exp(x_j) > 1.
    const double lo = (std::log(xs(j)) - cs(j) - 1.0) / xs(j) - 1.0;
    const double root = bracketed_scalar_root(psi, lo, lo + std::max(1.0, std::abs(lo)), 1e-16);
    v = (-c.array() - root * x.array() - 1.0).exp().matrix() - x;
  }
  const double kkt = constrained_residual(spec, c, v, nullptr);
  return SubproblemSolution{tangent(spec, std::move(v)), kkt,
                            SubproblemMethod::SphereScalarRoot, 0};
}

SubproblemSolution solve_generic_constrained(const SubproblemSpec& spec,
                                             const SplittingOptions& options) {
  validate(spec);
  if (!spec.constrained) {
    throw Error(ErrorKind::InvalidArgument, "solve_generic_constrained: needs tangent constraint");
  }
  const Matrix& x = spec.base.ambient();
  const Manifold& M = spec.manifold;
  const double gamma = spec.gamma;
  const Matrix grad_h_x = spec.h.gradient(x);
  const Matrix Px = M.project_tangent(spec.base, x).ambient;
  const double normal_sq = (x - Px).squaredNorm();
  const double tol = options.tolerance * std::max(1.0, x.norm());

  // v-step: min_{v in T} <grad f + y, v> + gamma D_h(x + v, x) + rho/2 |x + v - z|^2
  int newton_iterations = 0;
  const auto v_step = [&](const Matrix& z, const Matrix& y, double rho, const Matrix& warm) {
    const Matrix d = M.project_tangent(spec.base, spec.euclid_grad + y - gamma * grad_h_x - rho * z)
                         .ambient;
    switch (spec.h.kind()) {
      case ReferenceKind::Quadratic:
        return Matrix(-d / (gamma + rho) - Px);
      case ReferenceKind::Quartic: {
        // |x + v|^2 = |P_N x|^2 + |d|^2 / s^2 with s = gamma (|x + v|^2 + 1) + rho.
        const double B = gamma * (normal_sq + 1.0) + rho;
        const double tau = positive_cubic_root(gamma * d.squaredNorm() / (B * B * B), 1.0);
        return Matrix(-(tau / B) * d - Px);
      }
      default: {
        TangentNewton newton(spec, spec.euclid_grad + y - gamma * grad_h_x, rho, z);
        return newton.solve(warm, newton_iterations);
      }
    }
  };

  const auto prox = [&](const Matrix& point, double rho) {
    return spec.g ? spec.g->prox(point, 1.0 / rho) : point;
  };

  double rho = gamma * spec.h.lambda();
  Matrix v = Matrix::Zero(x.rows(), x.cols());
  Matrix z = x;
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  int k = 0;
  for (; k < options.max_iterations; ++k) {
    v = v_step(z, y, rho, v);
    const Matrix z_old = z;
    z = prox(x + v + y / rho, rho);
    const Matrix gap = x + v - z;
    y += rho * gap;
    primal = gap.norm();
    dual = rho * M.project_tangent(spec.base, z - z_old).norm();
    if (primal <= tol && dual <= tol) break;
    if (primal > 10.0 * dual) {
      rho *= 2.0;
    } else if (dual > 10.0 * primal) {
      rho *= 0.5;
    }
  }
  if (k == options.max_iterations) {
    std::ostringstream msg;
    msg << "splitting: no convergence in " << options.max_iterations
        << " iterations (primal " << primal << ", dual " << dual << ")";
    throw InexactSolveError(primal, dual, msg.str());
  }
  const Matrix c = spec.euclid_grad / gamma - grad_h_x;
  const double kkt = constrained_residual(spec, c, v, spec.g ? &y : nullptr);
  return SubproblemSolution{tangent(spec, std::move(v)), kkt, SubproblemMethod::Splitting,
                            k + 1 + newton_iterations};
}

SubproblemSolution solve_unconstrained(const SubproblemSpec& spec) {
  validate(spec);
  if (spec.constrained) {
    throw Error(ErrorKind::InvalidArgument, "solve_unconstrained: spec is tangent constrained");
  }
  const Matrix& x = spec.base.ambient();
  const Matrix rgrad = spec.manifold.project_tangent(spec.base, spec.euclid_grad).ambient;
  const Matrix target = spec.h.gradient(x) - rgrad / spec.gamma;  // grad h(x + v) = target

  Matrix v;
  SubproblemMethod method = SubproblemMethod::UnconstrainedClosedForm;
  int iterations = 0;
  switch (spec.h.kind()) {
    case ReferenceKind::Quadratic:
      v = -rgrad / spec.gamma;
      break;
    case ReferenceKind::Quartic: {
      // x + v = -theta c' with |c'|^2 theta^3 + theta - 1 = 0, c' = -target.
      const double theta = positive_cubic_root(target.squaredNorm(), 1.0);
      v = theta * target - x;
      break;
    }
    default: {
      // Separable h: coordinatewise damped Newton on h(w) - <target, w>.
      method = SubproblemMethod::UnconstrainedNewton;
      if (spec.h.kind() == ReferenceKind::LogBarrier && !(target.array() < 0.0).all()) {
        throw Error(ErrorKind::InfeasibleSubproblem,
                    "solve_unconstrained: -1/w = target has no positive solution");
      }
      Matrix w = x;
      const double scale = std::max(1.0, target.norm());
      for (;; ++iterations) {
        const Matrix residual = spec.h.gradient(w) - target;
        if (residual.norm() <= 1e-13 * scale) break;
        if (iterations >= 200) {
          throw InexactSolveError(residual.norm(), 0.0, "solve_unconstrained: Newton cap reached");
        }
        const Matrix ones = Matrix::Ones(w.rows(), w.cols());
        const Matrix step = residual.cwiseQuotient(spec.h.hessian_apply(w, ones));
        double t = 1.0;
        Matrix trial = w - step;
        while (!spec.h.in_domain(trial) && t > 1e-12) {
          t *= 0.5;
          trial = w - t * step;
        }
        w = trial;
      }
      v = w - x;
    }
  }
  const double kkt = (spec.h.gradient(x + v) - target).norm();
  return SubproblemSolution{TangentVector{std::move(v), spec.base.id(), VectorSpace::Ambient},
                            kkt, method, iterations};
}

SubproblemSolution solve_constrained(const SubproblemSpec& spec) {
  if (!spec.g) {
    switch (spec.h.kind()) {
      case ReferenceKind::Quartic:
        return solve_quartic_tangent(spec);
      case ReferenceKind::Quadratic: {
        validate(spec);
        // grad h = identity: v = -P_T(grad f) / gamma.
        const Matrix c = linear_coefficient(spec);
        Matrix v = -spec.manifold.project_tangent(spec.base, spec.euclid_grad).ambient / spec.gamma;
        const double kkt = constrained_residual(spec, c, v, nullptr);
        return SubproblemSolution{tangent(spec, std::move(v)), kkt,
                                  SubproblemMethod::QuadraticClosedForm, 0};
      }
      default:
        if (spec.manifold.kind() == ManifoldKind::Sphere) return solve_sphere_scalar(spec);
    }
  }
  return solve_generic_constrained(spec);
}

SubproblemSolution solve_subproblem(const SubproblemSpec& spec) {
  return spec.constrained ? solve_constrained(spec) : solve_unconstrained(spec);
}

}  // namespace rbgd
