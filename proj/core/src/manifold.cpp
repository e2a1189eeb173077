#include "rbgd/manifold.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "rbgd/errors.hpp"

namespace rbgd {

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Stiefel: return "stiefel";
    case ManifoldKind::FixedRank: return "fixed_rank";
  }
  return "unknown";
}

namespace {

std::uint64_t next_point_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::string dims(Index a, Index b) {
  std::ostringstream out;
  out << a << "x" << b;
  return out.str();
}

}  // namespace

ManifoldPoint::ManifoldPoint(ManifoldKind kind, Matrix x, std::optional<SvdResult> cache)
    : kind_(kind), x_(std::move(x)), cache_(std::move(cache)), id_(next_point_id()) {}

Manifold::Manifold(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::InvalidArgument, "manifold dimensions must be positive");
  }
}

void Manifold::check_point(const ManifoldPoint& x) const {
  if (x.kind() != kind() || x.ambient().rows() != rows_ || x.ambient().cols() != cols_) {
    throw Error(ErrorKind::InvalidArgument,
                "point does not belong to manifold " + name());
  }
}

void Manifold::check_shape(const Matrix& w, const char* what) const {
  if (w.rows() != rows_ || w.cols() != cols_) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": expected " + dims(rows_, cols_) + ", got " +
                    dims(w.rows(), w.cols()));
  }
}

ManifoldPoint Manifold::point(const Matrix& x) const {
  check_shape(x, "point");
  const double residual = feasibility_residual(x);
  if (!(residual <= kTolerances.feasibility)) {
    std::ostringstream msg;
    msg << "point is not on " << name() << " (residual " << residual << ")";
    throw Error(ErrorKind::Feasibility, msg.str());
  }
  return wrap(x);
}

TangentVector Manifold::project_tangent(const ManifoldPoint& x, const Matrix& w) const {
  check_point(x);
  check_shape(w, "project_tangent");
  return TangentVector{tangent_projection(x, w), x.id(), VectorSpace::Tangent};
}

TangentVector Manifold::project_normal(const ManifoldPoint& x, const Matrix& w) const {
  check_point(x);
  check_shape(w, "project_normal");
  return TangentVector{w - tangent_projection(x, w), x.id(), VectorSpace::Normal};
}

ManifoldPoint Manifold::retract(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x);
  check_shape(v.ambient, "retract");
  if (v.base_id != x.id() || v.space != VectorSpace::Tangent) {
    throw Error(ErrorKind::InvalidArgument, "retract: vector is not tangent at this point");
  }
  if (v.ambient.isZero(0.0)) return x;
  return retraction(x, v.ambient);
}

ManifoldPoint Manifold::project(const Matrix& w) const {
  check_shape(w, "project");
  if (!w.allFinite()) {
    throw Error(ErrorKind::RetractionDomain, "project: non-finite input");
  }
  return metric_projection(w);
}

ManifoldPoint Manifold::random_point(Rng& rng) const {
  return metric_projection(gaussian_matrix(rows_, cols_, rng));
}

// ---------------------------------------------------------------- Sphere

Sphere::Sphere(Index n, Index cols) : Manifold(n, cols) {
  if (n * cols < 2) {
    throw Error(ErrorKind::InvalidArgument, "sphere needs ambient dimension >= 2");
  }
}

std::string Sphere::name() const { return "sphere(" + dims(rows(), cols()) + ")"; }

double Sphere::feasibility_residual(const Matrix& x) const {
  return std::abs(x.norm() - 1.0);
}

Matrix Sphere::feasibility_offset(const Matrix& x) const {
  return -0.5 * (x.squaredNorm() - 1.0) * x;
}

Matrix Sphere::tangent_projection(const ManifoldPoint& x, const Matrix& w) const {
  const Matrix& p = x.ambient();
  return w - p * p.cwiseProduct(w).sum();
}

ManifoldPoint Sphere::metric_projection(const Matrix& w) const {
  const double n = w.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::RetractionDomain, "sphere: cannot normalize a zero vector");
  }
  return make_point(w / n, std::nullopt);
}

ManifoldPoint Sphere::retraction(const ManifoldPoint& x, const Matrix& v) const {
  return metric_projection(x.ambient() + v);
}

ManifoldPoint Sphere::wrap(const Matrix& x) const { return make_point(x, std::nullopt); }

// ---------------------------------------------------------------- Stiefel

Stiefel::Stiefel(Index m, Index p) : Manifold(m, p) {
  if (m < p) throw Error(ErrorKind::InvalidArgument, "Stiefel manifold needs m >= p");
}

std::string Stiefel::name() const { return "stiefel(" + dims(rows(), cols()) + ")"; }

double Stiefel::feasibility_residual(const Matrix& x) const {
  return (x.transpose() * x - Matrix::Identity(x.cols(), x.cols())).norm();
}

Matrix Stiefel::feasibility_offset(const Matrix& x) const {
  return -0.5 * x * (x.transpose() * x - Matrix::Identity(x.cols(), x.cols()));
}

Matrix Stiefel::tangent_projection(const ManifoldPoint& x, const Matrix& w) const {
  const Matrix& X = x.ambient();
  const Matrix XtW = X.transpose() * w;
  return w - X * (0.5 * (XtW + XtW.transpose()));
}

ManifoldPoint Stiefel::metric_projection(const Matrix& w) const {
  try {
    return make_point(polar_factor(w), std::nullopt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateProjection) throw;
    throw Error(ErrorKind::RetractionDomain, "stiefel: X + V is rank deficient");
  }
}

ManifoldPoint Stiefel::retraction(const ManifoldPoint& x, const Matrix& v) const {
  return metric_projection(x.ambient() + v);
}

ManifoldPoint Stiefel::wrap(const Matrix& x) const { return make_point(x, std::nullopt); }

// ---------------------------------------------------------------- FixedRank

FixedRank::FixedRank(Index m, Index p, Index r) : Manifold(m, p), r_(r) {
  if (r < 1 || r > std::min(m, p)) {
    throw Error(ErrorKind::InvalidArgument, "fixed-rank manifold needs 1 <= r <= min(m, p)");
  }
}

std::string FixedRank::name() const {
  std::ostringstream out;
  out << "fixed_rank(" << dims(rows(), cols()) << ", r=" << r_ << ")";
  return out.str();
}

double FixedRank::feasibility_residual(const Matrix& x) const {
  const SvdResult f = svd(x);
  if (!(f.s(r_ - 1) > kTolerances.rank_threshold * f.s(0))) {
    return std::numeric_limits<double>::infinity();
  }
  return f.s.size() > r_ ? f.s(r_) : 0.0;
}

std::optional<SvdResult> FixedRank::truncate(const Matrix& w) const {
  SvdResult f = svd(w);
  if (!(f.s(r_ - 1) > kTolerances.rank_threshold * f.s(0))) return std::nullopt;
  if (f.s.size() > r_) {
    f.U = f.U.leftCols(r_).eval();
    f.s = f.s.head(r_).eval();
    f.V = f.V.leftCols(r_).eval();
  }
  return f;
}

Matrix FixedRank::tangent_projection(const ManifoldPoint& x, const Matrix& w) const {
  const SvdResult& f = *x.svd_cache();
  const Matrix UtW = f.U.transpose() * w;
  const Matrix WV = w * f.V;
  return f.U * UtW + WV * f.V.transpose() - f.U * (UtW * f.V) * f.V.transpose();
}

ManifoldPoint FixedRank::metric_projection(const Matrix& w) const {
  auto f = truncate(w);
  if (!f) {
    throw Error(ErrorKind::RetractionDomain, "fixed_rank: r-th singular value below threshold");
  }
  // With r == min(m, p) nothing is truncated and w is already on the manifold.
  if (r_ == std::min(rows(), cols())) return make_point(w, std::move(f));
  Matrix x = f->U * f->s.asDiagonal() * f->V.transpose();
  return make_point(std::move(x), std::move(f));
}

ManifoldPoint FixedRank::retraction(const ManifoldPoint& x, const Matrix& v) const {
  return metric_projection(x.ambient() + v);
}

ManifoldPoint FixedRank::wrap(const Matrix& x) const {
  auto f = truncate(x);
  if (!f) throw Error(ErrorKind::Feasibility, "fixed_rank: point is rank deficient");
  return make_point(x, std::move(f));
}

std::unique_ptr<Manifold> make_manifold(const ManifoldSpec& spec) {
  switch (spec.kind) {
    case ManifoldKind::Sphere: return std::make_unique<Sphere>(spec.rows, spec.cols);
    case ManifoldKind::Stiefel: return std::make_unique<Stiefel>(spec.rows, spec.cols);
    case ManifoldKind::FixedRank:
      return std::make_unique<FixedRank>(spec.rows, spec.cols, spec.rank);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown manifold kind");
}

}  // namespace rbgd
