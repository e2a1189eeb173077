#pragma once

#include "rbgd/numerics.hpp"

namespace rbgd {

enum class ReferenceKind { Quadratic, Quartic, LogBarrier, Entropy };

const char* to_string(ReferenceKind kind);

/// Box [lower, upper]^n inside the positive orthant on which the barrier and
/// entropy references are strongly convex.
struct DomainBox {
  double lower = 0.0;
  double upper = 1.0;
};

/** Reference function h generating the Bregman distance.
 *
 *   quadratic   h(x) = 1/2 |x|^2                 lambda = 1
 *   quartic     h(x) = 1/4 |x|^4 + 1/2 |x|^2     lambda = 1
 *   log_barrier h(x) = -sum log x_i              lambda = 1 / upper^2
 *   entropy     h(x) = sum x_i log x_i           lambda = 1 / upper
 *
 * The last two live on the open positive orthant; evaluating them elsewhere
 * throws DomainError with the offending (column-major) index. */
class ReferenceFunction {
 public:
  static ReferenceFunction quadratic();
  static ReferenceFunction quartic();
  static ReferenceFunction log_barrier(DomainBox box);
  static ReferenceFunction entropy(DomainBox box);

  ReferenceKind kind() const { return kind_; }
  /// Strong convexity constant on the relevant domain.
  double lambda() const { return lambda_; }
  /// Separable references have a diagonal Hessian.
  bool separable() const { return kind_ != ReferenceKind::Quartic; }
  bool in_domain(const Matrix& x) const;

  double value(const Matrix& x) const;
  Matrix gradient(const Matrix& x) const;
  /// Hessian-vector product at x applied to d.
  Matrix hessian_apply(const Matrix& x, const Matrix& d) const;

 private:
  ReferenceFunction(ReferenceKind kind, double lambda) : kind_(kind), lambda_(lambda) {}
  void check_domain(const Matrix& x) const;

  ReferenceKind kind_;
  double lambda_;
};

double h_value(const ReferenceFunction& h, const Matrix& x);
Matrix h_grad(const ReferenceFunction& h, const Matrix& x);

struct BregmanEval {
  double value = 0.0;
  /// Gradient of D_h(., x) at the first argument: grad h(y) - grad h(x).
  Matrix grad_at_first;
};

/// D_h(y, x) = h(y) - h(x) - <grad h(x), y - x>.
BregmanEval bregman(const ReferenceFunction& h, const Matrix& y, const Matrix& x);

}  // namespace rbgd
