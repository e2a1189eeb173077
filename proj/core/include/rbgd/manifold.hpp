#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "rbgd/numerics.hpp"
#include "rbgd/rng.hpp"

namespace rbgd {

enum class ManifoldKind { Sphere, Stiefel, FixedRank };

const char* to_string(ManifoldKind kind);

/// Point on an embedded submanifold. Immutable once built; only Manifold
/// creates them, so a point is feasible by construction. Copies share the id
/// of the original, which is what tangent vectors use to name their base.
class ManifoldPoint {
 public:
  const Matrix& ambient() const { return x_; }
  ManifoldKind kind() const { return kind_; }
  std::uint64_t id() const { return id_; }
  /// Rank-r thin SVD of the point; present for fixed-rank points only.
  const SvdResult* svd_cache() const { return cache_ ? &*cache_ : nullptr; }

 private:
  friend class Manifold;
  ManifoldPoint(ManifoldKind kind, Matrix x, std::optional<SvdResult> cache);

  ManifoldKind kind_;
  Matrix x_;
  std::optional<SvdResult> cache_;
  std::uint64_t id_;
};

enum class VectorSpace { Tangent, Normal, Ambient };

/// Ambient tensor tagged with the point it is attached to and whether it
/// lives in the tangent or the normal space there (Ambient: neither).
struct TangentVector {
  Matrix ambient;
  std::uint64_t base_id = 0;
  VectorSpace space = VectorSpace::Tangent;

  double norm() const { return ambient.norm(); }
};

/** Geometry contract for an embedded submanifold of R^{rows x cols}.
 *
 * Public entry points validate shapes and the point/manifold pairing, then
 * defer to the protected hooks implemented by each geometry. */
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  virtual std::string name() const = 0;
  /// Compact manifolds admit the stochastic solvers.
  virtual bool compact() const = 0;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  /// Feasibility residual of an arbitrary ambient matrix.
  virtual double feasibility_residual(const Matrix& x) const = 0;
  /// First-order displacement d with x + d on the manifold up to
  /// O(residual^2), for x within rounding error of it. Zero on open sets.
  virtual Matrix feasibility_offset(const Matrix& x) const { return Matrix::Zero(x.rows(), x.cols()); }

  /// Wraps x as a point. Throws Feasibility when x is not on the manifold.
  ManifoldPoint point(const Matrix& x) const;

  TangentVector project_tangent(const ManifoldPoint& x, const Matrix& w) const;
  TangentVector project_normal(const ManifoldPoint& x, const Matrix& w) const;

  /// Retr(x, v). Throws RetractionDomain when x + v leaves the domain of
  /// the retraction map.
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const;

  /// Nearest-point projection of w onto the manifold. Throws
  /// RetractionDomain when the projection is not well defined at w.
  ManifoldPoint project(const Matrix& w) const;

  /// Projection of i.i.d. standard normals.
  ManifoldPoint random_point(Rng& rng) const;

 protected:
  Manifold(Index rows, Index cols);

  ManifoldPoint make_point(Matrix x, std::optional<SvdResult> cache) const {
    return ManifoldPoint(kind(), std::move(x), std::move(cache));
  }

  virtual Matrix tangent_projection(const ManifoldPoint& x, const Matrix& w) const = 0;
  virtual ManifoldPoint metric_projection(const Matrix& w) const = 0;
  virtual ManifoldPoint retraction(const ManifoldPoint& x, const Matrix& v) const = 0;
  virtual ManifoldPoint wrap(const Matrix& x) const = 0;

 private:
  void check_point(const ManifoldPoint& x) const;
  void check_shape(const Matrix& w, const char* what) const;

  Index rows_;
  Index cols_;
};

/// Unit Frobenius sphere in R^{rows x cols}.
class Sphere final : public Manifold {
 public:
  explicit Sphere(Index n, Index cols = 1);

  ManifoldKind kind() const override { return ManifoldKind::Sphere; }
  std::string name() const override;
  bool compact() const override { return true; }
  double feasibility_residual(const Matrix& x) const override;
  Matrix feasibility_offset(const Matrix& x) const override;

 protected:
  Matrix tangent_projection(const ManifoldPoint& x, const Matrix& w) const override;
  ManifoldPoint metric_projection(const Matrix& w) const override;
  ManifoldPoint retraction(const ManifoldPoint& x, const Matrix& v) const override;
  ManifoldPoint wrap(const Matrix& x) const override;
};

/// St(m, p) = { X : X^T X = I_p }, with the polar retraction.
class Stiefel final : public Manifold {
 public:
  Stiefel(Index m, Index p);

  ManifoldKind kind() const override { return ManifoldKind::Stiefel; }
  std::string name() const override;
  bool compact() const override { return true; }
  double feasibility_residual(const Matrix& x) const override;
  Matrix feasibility_offset(const Matrix& x) const override;

 protected:
  Matrix tangent_projection(const ManifoldPoint& x, const Matrix& w) const override;
  ManifoldPoint metric_projection(const Matrix& w) const override;
  ManifoldPoint retraction(const ManifoldPoint& x, const Matrix& v) const override;
  ManifoldPoint wrap(const Matrix& x) const override;
};

/** m x p matrices of rank exactly r. Points carry their rank-r thin SVD; the
 * retraction is the metric projection (truncated SVD). With p == r this is
 * the open set of full-column-rank matrices and the tangent space is all of
 * R^{m x r}. */
class FixedRank final : public Manifold {
 public:
  FixedRank(Index m, Index p, Index r);

  ManifoldKind kind() const override { return ManifoldKind::FixedRank; }
  std::string name() const override;
  bool compact() const override { return false; }
  double feasibility_residual(const Matrix& x) const override;
  Index rank() const { return r_; }

 protected:
  Matrix tangent_projection(const ManifoldPoint& x, const Matrix& w) const override;
  ManifoldPoint metric_projection(const Matrix& w) const override;
  ManifoldPoint retraction(const ManifoldPoint& x, const Matrix& v) const override;
  ManifoldPoint wrap(const Matrix& x) const override;

 private:
  /// Truncated SVD; nullopt when the r-th singular value is below threshold.
  std::optional<SvdResult> truncate(const Matrix& w) const;

  Index r_;
};

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Sphere;
  Index rows = 0;
  Index cols = 1;
  Index rank = 0;  ///< fixed-rank only
};

std::unique_ptr<Manifold> make_manifold(const ManifoldSpec& spec);

}  // namespace rbgd
