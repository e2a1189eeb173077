#include "rbgd/problems.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rbgd/errors.hpp"

namespace rbgd {

double Problem::objective(const Matrix& X) const {
  const double f = value(X);
  const auto g = nonsmooth();
  return g ? f + g->value(X) : f;
}

RegularizedProblem::RegularizedProblem(const Problem& base, NonsmoothTerm g)
    : base_(base), g_(g) {}

std::string RegularizedProblem::name() const {
  std::ostringstream out;
  out << base_.name() << "+l1(" << g_.weight << ")";
  return out.str();
}

NepvProblem::NepvProblem(Index m, Index p, double beta)
    : m_(m), p_(p), beta_(beta) {
  if (m < 1 || p < 1 || p > m) {
    throw Error(ErrorKind::InvalidArgument, "nepv: need m >= p >= 1");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "nepv: beta must be finite and non-negative");
  }
  diag_ = Vector::Constant(m, 2.0);
  offdiag_ = Vector::Constant(m - 1, -1.0);
}

std::string NepvProblem::name() const {
  std::ostringstream out;
  out << "nepv(m=" << m_ << ",p=" << p_ << ",beta=" << beta_ << ")";
  return out.str();
}

Matrix NepvProblem::apply_laplacian(const Matrix& X) const {
  Matrix LX = 2.0 * X;
  if (m_ > 1) {
    LX.topRows(m_ - 1) -= X.bottomRows(m_ - 1);
    LX.bottomRows(m_ - 1) -= X.topRows(m_ - 1);
  }
  return LX;
}

Vector NepvProblem::potential(const Matrix& X) const {
  const Vector rho = X.rowwise().squaredNorm();
  return solve_spd_tridiagonal(diag_, offdiag_, rho);
}

double NepvProblem::value(const Matrix& X) const {
  const Vector rho = X.rowwise().squaredNorm();
  const Vector w = solve_spd_tridiagonal(diag_, offdiag_, rho);
  const double kinetic = 0.5 * X.cwiseProduct(apply_laplacian(X)).sum();
  return kinetic + 0.25 * beta_ * rho.dot(w);
}

double NepvProblem::value_change(const Matrix& Y, const Matrix& X) const {
  // Differences of quadratic forms as <D, . S> with D = Y - X, S = Y + X.
  const Matrix D = Y - X;
  const Matrix S = Y + X;
  const Vector d_rho = D.cwiseProduct(S).rowwise().sum();
  const Vector s_rho = Y.rowwise().squaredNorm() + X.rowwise().squaredNorm();
  const Vector w = solve_spd_tridiagonal(diag_, offdiag_, s_rho);
  return 0.5 * D.cwiseProduct(apply_laplacian(S)).sum() + 0.25 * beta_ * d_rho.dot(w);
}

Matrix NepvProblem::gradient(const Matrix& X) const {
  return apply_laplacian(X) + beta_ * (potential(X).asDiagonal() * X);
}

SensingProblem::SensingProblem(Matrix Y, Vector c, Matrix X_star)
    : Y_(std::move(Y)), c_(std::move(c)), X_star_(std::move(X_star)) {
  if (Y_.rows() < 1 || Y_.rows() != c_.size() || Y_.cols() != X_star_.rows() ||
      X_star_.cols() < 1) {
    throw Error(ErrorKind::InvalidArgument, "sensing: inconsistent dimensions");
  }
}

std::string SensingProblem::name() const {
  std::ostringstream out;
  out << "sensing(m=" << rows() << ",r=" << cols() << ",N=" << sample_count() << ")";
  return out.str();
}

double SensingProblem::value(const Matrix& X) const {
  const Matrix P = Y_ * X;
  const Vector r = P.rowwise().squaredNorm() - c_;
  return 0.5 * r.squaredNorm();
}

double SensingProblem::value_change(const Matrix& Y, const Matrix& X) const {
  const Matrix PD = Y_ * (Y - X);
  const Matrix PS = Y_ * (Y + X);
  const Vector d_res = PD.cwiseProduct(PS).rowwise().sum();
  const Vector s_res = (Y_ * Y).rowwise().squaredNorm() + (Y_ * X).rowwise().squaredNorm() - 2.0 * c_;
  return 0.5 * d_res.dot(s_res);
}

namespace {

/// Gradient of 1/2 sum_j (|X^T y_j|^2 - c_j)^2 over the rows y_j of Y.
Matrix sensing_gradient(const Matrix& Y, const Vector& c, const Matrix& X) {
  const Matrix P = Y * X;
  const Vector r = P.rowwise().squaredNorm() - c;
  return 2.0 * (Y.transpose() * (r.asDiagonal() * P));
}

}  // namespace

Matrix SensingProblem::gradient(const Matrix& X) const { return sensing_gradient(Y_, c_, X); }

Matrix SensingProblem::sample_gradient(const Matrix& X, std::span<const Index> indices) const {
  if (indices.empty()) {
    throw Error(ErrorKind::InvalidArgument, "sensing: empty minibatch");
  }
  const auto batch = static_cast<Index>(indices.size());
  Matrix YB(batch, Y_.cols());
  Vector cB(batch);
  for (Index k = 0; k < batch; ++k) {
    const Index j = indices[static_cast<std::size_t>(k)];
    if (j < 0 || j >= sample_count()) {
      throw Error(ErrorKind::InvalidArgument, "sensing: sample index out of range");
    }
    YB.row(k) = Y_.row(j);
    cB(k) = c_(j);
  }
  // The enumerated full batch goes through the same kernel as gradient(), so
  // the two agree bit for bit.
  if (batch == sample_count() && std::is_sorted(indices.begin(), indices.end()) &&
      std::adjacent_find(indices.begin(), indices.end()) == indices.end()) {
    return sensing_gradient(Y_, c_, X);
  }
  const double scale = static_cast<double>(sample_count()) / static_cast<double>(batch);
  return scale * sensing_gradient(YB, cB, X);
}

double SensingProblem::recovery_error(const Matrix& X) const {
  const Matrix target = X_star_ * X_star_.transpose();
  return (X * X.transpose() - target).norm() / target.norm();
}

SensingProblem generate_sensing(Index m, Index r, Index N, Rng& rng) {
  if (m < 1 || r < 1 || r > m || N < 1) {
    throw Error(ErrorKind::InvalidArgument, "generate_sensing: need m >= r >= 1 and N >= 1");
  }
  Matrix Y = gaussian_matrix(N, m, rng);
  Matrix X_star = gaussian_matrix(m, r, rng);
  Vector c = (Y * X_star).rowwise().squaredNorm();
  return SensingProblem(std::move(Y), std::move(c), std::move(X_star));
}

MinibatchOracle::MinibatchOracle(const StochasticProblem& problem, Rng rng)
    : problem_(problem), rng_(std::move(rng)) {}

std::vector<Index> MinibatchOracle::draw(Index batch) {
  if (batch < 1) throw Error(ErrorKind::InvalidArgument, "minibatch size must be >= 1");
  const auto n = static_cast<std::uint64_t>(problem_.sample_count());
  std::vector<Index> indices(static_cast<std::size_t>(batch));
  for (auto& j : indices) j = static_cast<Index>(rng_.uniform_index(n));
  return indices;
}

Matrix MinibatchOracle::gradient(const Matrix& X, Index batch) {
  const auto indices = draw(batch);
  return problem_.sample_gradient(X, indices);
}

Matrix MinibatchOracle::enumerate(const Matrix& X) const {
  std::vector<Index> indices(static_cast<std::size_t>(problem_.sample_count()));
  std::iota(indices.begin(), indices.end(), Index{0});
  return problem_.sample_gradient(X, indices);
}

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Nepv: return "nepv";
    case ProblemKind::Sensing: return "sensing";
  }
  return "unknown";
}

std::string to_json(const ProblemDescriptor& d) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(d.kind);
  j["m"] = d.m;
  if (d.kind == ProblemKind::Nepv) {
    j["p"] = d.p;
    j["beta"] = d.beta;
  } else {
    j["r"] = d.p;
    j["N"] = d.N;
    j["seed"] = d.seed;
  }
  return j.dump();
}

ProblemDescriptor problem_descriptor_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ProblemDescriptor d;
    const auto kind = j.at("kind").get<std::string>();
    d.m = j.at("m").get<Index>();
    if (kind == "nepv") {
      d.kind = ProblemKind::Nepv;
      d.p = j.at("p").get<Index>();
      d.beta = j.value("beta", 10.0);
    } else if (kind == "sensing") {
      d.kind = ProblemKind::Sensing;
      d.p = j.at("r").get<Index>();
      d.N = j.value("N", Index{100});
      d.seed = j.value("seed", std::uint64_t{0});
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown problem kind '" + kind + "'");
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("problem descriptor: ") + e.what());
  }
}

std::unique_ptr<Problem> instantiate(const ProblemDescriptor& d) {
  if (d.kind == ProblemKind::Nepv) return std::make_unique<NepvProblem>(d.m, d.p, d.beta);
  Rng rng(d.seed);
  return std::make_unique<SensingProblem>(generate_sensing(d.m, d.p, d.N, rng));
}

}  // namespace rbgd
