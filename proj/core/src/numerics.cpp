#include "rbgd/numerics.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "rbgd/errors.hpp"

namespace rbgd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::DegenerateProjection: return "degenerate-projection";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::RootNotBracketed: return "root-not-bracketed";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Feasibility: return "feasibility";
    case ErrorKind::RetractionDomain: return "retraction-domain";
    case ErrorKind::InfeasibleSubproblem: return "infeasible-subproblem";
    case ErrorKind::InexactSolve: return "inexact-solve";
  }
  return "unknown";
}

bool all_finite(const Matrix& A) { return A.allFinite(); }

namespace {

SvdResult tall_svd(const Matrix& A) {
  const Index m = A.rows();
  const Index n = A.cols();

  Eigen::HouseholderQR<Matrix> qr(A);
  const Matrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Matrix Q = Matrix::Identity(m, n);
  Q.applyOnTheLeft(qr.householderQ());

  Eigen::JacobiSVD<Matrix, Eigen::NoQRPreconditioner> inner(
      R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (inner.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "svd: Jacobi iteration did not converge");
  }
  SvdResult out{Q * inner.matrixU(), inner.singularValues(), inner.matrixV()};
  if (!out.U.allFinite() || !out.s.allFinite() || !out.V.allFinite()) {
    throw Error(ErrorKind::NumericalFailure, "svd: non-finite factors");
  }
  return out;
}

}  // namespace

SvdResult svd(const Matrix& A) {
  if (A.rows() == 0 || A.cols() == 0) {
    throw Error(ErrorKind::InvalidArgument, "svd: empty matrix");
  }
  if (!A.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "svd: input has non-finite entries");
  }
  if (A.rows() < A.cols()) {
    SvdResult t = tall_svd(A.transpose());
    return SvdResult{std::move(t.V), std::move(t.s), std::move(t.U)};
  }
  return tall_svd(A);
}

Matrix polar_factor(const Matrix& A) {
  if (A.rows() < A.cols()) {
    throw Error(ErrorKind::InvalidArgument, "polar_factor: matrix must be tall");
  }
  if (A.allFinite() && A.cols() > 0) {
    // Well-conditioned input: U V^T = A (A^T A)^{-1/2}, with orthonormality
    // error of order eps * cond(A)^2.
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A);
    const Vector& lam = eig.eigenvalues();
    if (eig.info() == Eigen::Success && lam(0) > 1e-2 * lam(lam.size() - 1)) {
      const Matrix& W = eig.eigenvectors();
      return A * (W * lam.cwiseSqrt().cwiseInverse().asDiagonal() * W.transpose());
    }
  }
  const SvdResult f = svd(A);
  const double smax = f.s(0);
  const double smin = f.s(f.s.size() - 1);
  if (!(smax > 0.0) || smin <= kTolerances.rank_threshold * smax) {
    throw Error(ErrorKind::DegenerateProjection,
                "polar_factor: matrix is numerically rank deficient");
  }
  return f.U * f.V.transpose();
}

Vector solve_spd_tridiagonal(const Vector& diag, const Vector& offdiag,
                             const Vector& b) {
  const Index n = diag.size();
  if (n == 0 || b.size() != n || offdiag.size() != std::max<Index>(n - 1, 0)) {
    throw Error(ErrorKind::InvalidArgument, "solve_spd_tridiagonal: size mismatch");
  }
  Vector c(n);  // modified super-diagonal
  Vector d(n);  // modified right-hand side
  double pivot = diag(0);
  if (pivot == 0.0) {
    throw Error(ErrorKind::SingularSystem, "solve_spd_tridiagonal: zero pivot at row 0");
  }
  c(0) = n > 1 ? offdiag(0) / pivot : 0.0;
  d(0) = b(0) / pivot;
  for (Index i = 1; i < n; ++i) {
    pivot = diag(i) - offdiag(i - 1) * c(i - 1);
    if (pivot == 0.0) {
      std::ostringstream msg;
      msg << "solve_spd_tridiagonal: zero pivot at row " << i;
      throw Error(ErrorKind::SingularSystem, msg.str());
    }
    c(i) = i + 1 < n ? offdiag(i) / pivot : 0.0;
    d(i) = (b(i) - offdiag(i - 1) * d(i - 1)) / pivot;
  }
  Vector x(n);
  x(n - 1) = d(n - 1);
  for (Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  return x;
}

double positive_cubic_root(double a, double b) {
  if (!(a >= 0.0) || !(b >= 1.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidArgument,
                "positive_cubic_root: requires finite a >= 0 and b >= 1");
  }
  if (a == 0.0) return 1.0 / b;

  const auto phi = [a, b](double t) { return (a * t * t + b) * t - 1.0; };

  // phi(0) = -1 < 0 and phi(1) = a + b - 1 >= 0. Newton converges
  // quadratically, so iterate until the step is at the rounding level of t.
  double lo = 0.0;
  double hi = 1.0;
  double t = std::min(1.0, 1.0 / b);
  for (int iter = 0; iter < 200; ++iter) {
    const double value = phi(t);
    if (value == 0.0) return t;
    if (value < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double slope = 3.0 * a * t * t + b;
    double next = t - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * t) return next;
    t = next;
  }
  return t;
}

double bracketed_scalar_root(const std::function<double(double)>& phi,
                             double lo, double hi, double tol) {
  if (!(hi > lo) || !(tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "bracketed_scalar_root: need lo < hi, tol > 0");
  }
  double f_lo = phi(lo);
  double f_hi = phi(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  const double origin = lo;
  int doublings = 0;
  while ((f_lo > 0.0) == (f_hi > 0.0)) {
    if (doublings++ >= kTolerances.max_bracket_doublings || !std::isfinite(f_hi)) {
      throw Error(ErrorKind::RootNotBracketed,
                  "bracketed_scalar_root: no sign change after bracket expansion");
    }
    lo = hi;
    f_lo = f_hi;
    hi = origin + 2.0 * (hi - origin);
    f_hi = phi(hi);
    if (f_hi == 0.0) return hi;
  }

  const auto converged = [tol](double a, double b) {
    const double scale = std::max(1.0, std::min(std::abs(a), std::abs(b)));
    return std::abs(b - a) <= tol * scale ||
           std::nextafter(a, b) == b;
  };
  std::uintmax_t max_iter = 500;
  const auto [a, b] = boost::math::tools::toms748_solve(
      [&phi](double x) { return phi(x); }, lo, hi, f_lo, f_hi, converged, max_iter);
  const double fa = phi(a);
  const double fb = phi(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

}  // namespace rbgd
