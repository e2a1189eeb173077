#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerics, so agreement is a real cross-check.

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace rbgd::oracle {

/// Plain bisection on [lo, hi] for an increasing function, run to the
/// resolution of doubles.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Root in (0, 1] of a t^3 + b t - 1.
inline double cubic_root_bisect(double a, double b) {
  return bisect([&](double t) { return a * t * t * t + b * t - 1.0; }, 0.0, 1.0);
}

/// Gaussian elimination with partial pivoting on a dense copy.
inline Eigen::VectorXd dense_solve(Eigen::MatrixXd A, Eigen::VectorXd b) {
  const Eigen::Index n = A.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    }
    A.row(k).swap(A.row(piv));
    std::swap(b(k), b(piv));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double l = A(i, k) / A(k, k);
      A.row(i) -= l * A.row(k);
      b(i) -= l * b(k);
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    x(i) = (b(i) - A.row(i).tail(n - 1 - i).dot(x.tail(n - 1 - i))) / A(i, i);
  }
  return x;
}

/// Central-difference gradient with step h.
inline Eigen::MatrixXd fd_gradient(const std::function<double(const Eigen::MatrixXd&)>& f,
                                   const Eigen::MatrixXd& X, double h) {
  Eigen::MatrixXd G(X.rows(), X.cols());
  Eigen::MatrixXd Y = X;
  for (Eigen::Index k = 0; k < X.size(); ++k) {
    const double x = Y.data()[k];
    Y.data()[k] = x + h;
    const double fp = f(Y);
    Y.data()[k] = x - h;
    const double fm = f(Y);
    Y.data()[k] = x;
    G.data()[k] = (fp - fm) / (2.0 * h);
  }
  return G;
}

/// Relative error |a - b| / max(1e-300, |b|).
inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace rbgd::oracle
