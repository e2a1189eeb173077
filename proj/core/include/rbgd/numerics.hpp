#pragma once

#include <Eigen/Dense>

#include <functional>

namespace rbgd {

/// Dense ambient-space tensor. Vectors are the one-column case and every norm
/// in the library is the Frobenius / l2 norm.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds shared by every module, gathered in one record so a
/// reproducibility study has a single place to look.
struct Tolerances {
  /// Relative reconstruction bound for svd().
  double svd_reconstruction = 1e-10;
  /// Smallest retained singular value relative to the largest.
  double rank_threshold = 1e-12;
  /// Maximum number of bracket doublings in bracketed_scalar_root.
  int max_bracket_doublings = 60;
  /// Absolute feasibility residual accepted for a manifold point.
  double feasibility = 1e-10;
  /// Cutoff for treating a tangent projection as exactly zero, relative to
  /// max(1, |input|).
  double degenerate_tangent = 1e-14;
};

inline constexpr Tolerances kTolerances{};

struct SvdResult {
  Matrix U;  ///< rows x k, orthonormal columns
  Vector s;  ///< k non-negative values, non-increasing
  Matrix V;  ///< cols x k, orthonormal columns
};

/// Thin SVD, k = min(rows, cols). Tall inputs are reduced by a Householder QR
/// first; wide inputs go through the transpose.
SvdResult svd(const Matrix& A);

/// Orthonormal polar factor U V^T of a tall matrix with full column rank.
/// Throws DegenerateProjection when the smallest singular value is below
/// rank_threshold times the largest.
Matrix polar_factor(const Matrix& A);

/** Solves T x = b for the symmetric tridiagonal T with main diagonal `diag`
 * and sub/super diagonal `offdiag` (Thomas algorithm). Throws SingularSystem
 * on a zero pivot. */
Vector solve_spd_tridiagonal(const Vector& diag, const Vector& offdiag,
                             const Vector& b);

/** Unique root in (0, 1] of a*t^3 + b*t - 1 = 0 for a >= 0, b >= 1.
 *
 * Newton's method started at min(1, 1/b) and kept inside the bracket (0, 1];
 * a bisection step replaces any Newton step that leaves the bracket. */
double positive_cubic_root(double a, double b);

/** Root of a continuous, strictly monotone scalar function.
 *
 * If phi(lo) and phi(hi) share a sign, the upper end is pushed outward by
 * doubling the bracket width (at most max_bracket_doublings times) before
 * giving up with RootNotBracketed. On return either |phi(root)| <= tol or the
 * final bracket is narrower than tol * max(1, |root|). */
double bracketed_scalar_root(const std::function<double(double)>& phi,
                             double lo, double hi, double tol);

/// True when every entry is finite.
bool all_finite(const Matrix& A);

}  // namespace rbgd
