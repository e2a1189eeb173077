#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbgd/numerics.hpp"
#include "rbgd/rng.hpp"
#include "rbgd/subproblem.hpp"

namespace rbgd {

/// Composite objective F = f + g with smooth f and an optional convex g.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  /// Smooth part f.
  virtual double value(const Matrix& X) const = 0;
  /// Euclidean gradient of f.
  virtual Matrix gradient(const Matrix& X) const = 0;
  /// f(Y) - f(X). Overrides evaluate it without cancellation so that
  /// sufficient-decrease tests stay meaningful when |f| >> |f(Y) - f(X)|.
  virtual double value_change(const Matrix& Y, const Matrix& X) const { return value(Y) - value(X); }
  /// Nonsmooth part g, absent for smooth problems.
  virtual std::optional<NonsmoothTerm> nonsmooth() const { return std::nullopt; }

  /// F(X) = f(X) + g(X).
  double objective(const Matrix& X) const;
};

/// f written as an expectation over uniform indices j in [0, N):
/// f(X) = E_j f_j(X) with f_j = N * term_j.
class StochasticProblem : public Problem {
 public:
  virtual Index sample_count() const = 0;
  /// Mean of grad f_j over the listed indices; repeats allowed.
  virtual Matrix sample_gradient(const Matrix& X, std::span<const Index> indices) const = 0;
};

/// Adds g = mu |X|_1 to a smooth problem. The base must outlive the wrapper.
class RegularizedProblem final : public Problem {
 public:
  RegularizedProblem(const Problem& base, NonsmoothTerm g);

  std::string name() const override;
  Index rows() const override { return base_.rows(); }
  Index cols() const override { return base_.cols(); }
  double value(const Matrix& X) const override { return base_.value(X); }
  Matrix gradient(const Matrix& X) const override { return base_.gradient(X); }
  double value_change(const Matrix& Y, const Matrix& X) const override {
    return base_.value_change(Y, X);
  }
  std::optional<NonsmoothTerm> nonsmooth() const override { return g_; }

 private:
  const Problem& base_;
  NonsmoothTerm g_;
};

/** Discretized Kohn-Sham nonlinear eigenvalue problem on St(m, p):
 *
 *   f(X) = 1/2 tr(X^T L X) + beta/4 rho^T L^{-1} rho,   rho_i = |X_{i,:}|^2
 *
 * with L the m x m Dirichlet Laplacian (2 on the diagonal, -1 next to it). */
class NepvProblem final : public Problem {
 public:
  NepvProblem(Index m, Index p, double beta);

  std::string name() const override;
  Index rows() const override { return m_; }
  Index cols() const override { return p_; }
  double beta() const { return beta_; }

  double value(const Matrix& X) const override;
  double value_change(const Matrix& Y, const Matrix& X) const override;
  /// L X + beta Diag(L^{-1} rho) X.
  Matrix gradient(const Matrix& X) const override;

  /// L X without forming L.
  Matrix apply_laplacian(const Matrix& X) const;
  /// L^{-1} rho_X.
  Vector potential(const Matrix& X) const;

 private:
  Index m_;
  Index p_;
  double beta_;
  Vector diag_;
  Vector offdiag_;
};

/** Low-rank quadratic sensing over m x r factors:
 *
 *   f(X) = 1/2 sum_j (|X^T y_j|^2 - c_j)^2,   c_j = |X_*^T y_j|^2
 *
 * The design vectors y_j are the rows of Y (N x m). */
class SensingProblem final : public StochasticProblem {
 public:
  SensingProblem(Matrix Y, Vector c, Matrix X_star);

  std::string name() const override;
  Index rows() const override { return Y_.cols(); }
  Index cols() const override { return X_star_.cols(); }
  Index sample_count() const override { return Y_.rows(); }

  const Matrix& design() const { return Y_; }
  const Vector& targets() const { return c_; }
  const Matrix& ground_truth() const { return X_star_; }

  double value(const Matrix& X) const override;
  double value_change(const Matrix& Y, const Matrix& X) const override;
  /// 2 Y^T Diag(r) (Y X) with r_j = |X^T y_j|^2 - c_j.
  Matrix gradient(const Matrix& X) const override;
  Matrix sample_gradient(const Matrix& X, std::span<const Index> indices) const override;

  /// |X X^T - X_* X_*^T| / |X_* X_*^T|.
  double recovery_error(const Matrix& X) const;

 private:
  Matrix Y_;
  Vector c_;
  Matrix X_star_;
};

/// y_j and X_* with i.i.d. standard normal entries (Y first, then X_*).
SensingProblem generate_sensing(Index m, Index r, Index N, Rng& rng);

/// Draws i.i.d. uniform minibatches (with replacement) from a stochastic problem.
class MinibatchOracle {
 public:
  MinibatchOracle(const StochasticProblem& problem, Rng rng);

  std::vector<Index> draw(Index batch);
  /// (1/|B|) sum_{j in B} grad f_j(X) for a fresh batch.
  Matrix gradient(const Matrix& X, Index batch);
  /// Every index exactly once: reproduces the full gradient bit for bit.
  Matrix enumerate(const Matrix& X) const;

 private:
  const StochasticProblem& problem_;
  Rng rng_;
};

enum class ProblemKind { Nepv, Sensing };

const char* to_string(ProblemKind kind);

/// Seed-only description of a problem instance; sensing data is regenerated
/// from `seed` through generate_sensing.
struct ProblemDescriptor {
  ProblemKind kind = ProblemKind::Nepv;
  Index m = 0;
  Index p = 0;  ///< orbital count (nepv) or rank r (sensing)
  double beta = 10.0;
  Index N = 100;
  std::uint64_t seed = 0;
};

std::string to_json(const ProblemDescriptor& descriptor);
/// Throws InvalidArgument on malformed documents.
ProblemDescriptor problem_descriptor_from_json(std::string_view text);
std::unique_ptr<Problem> instantiate(const ProblemDescriptor& descriptor);

}  // namespace rbgd
