#include <gtest/gtest.h>

#include <cmath>

#include <rbgd/errors.hpp>
#include <rbgd/solvers.hpp>

namespace rbgd {
namespace {

/// f(x) = 1/2 x^T A x with diagonal A; on the sphere its minimizers are
/// +-e_k for the smallest entry of A.
class DiagonalQuadratic final : public Problem {
 public:
  explicit DiagonalQuadratic(Vector a) : a_(std::move(a)) {}
  std::string name() const override { return "diag_quadratic"; }
  Index rows() const override { return a_.size(); }
  Index cols() const override { return 1; }
  double value(const Matrix& X) const override { return 0.5 * X.col(0).dot(a_.cwiseProduct(X.col(0))); }
  Matrix gradient(const Matrix& X) const override { return a_.cwiseProduct(X.col(0)); }
  double value_change(const Matrix& Y, const Matrix& X) const override {
    return 0.5 * (Y - X).col(0).dot(a_.cwiseProduct((Y + X).col(0)));
  }

 private:
  Vector a_;
};

/// f(X) = 1/2 |X - B|^2.
class Distance final : public Problem {
 public:
  explicit Distance(Matrix B) : B_(std::move(B)) {}
  std::string name() const override { return "distance"; }
  Index rows() const override { return B_.rows(); }
  Index cols() const override { return B_.cols(); }
  double value(const Matrix& X) const override { return 0.5 * (X - B_).squaredNorm(); }
  Matrix gradient(const Matrix& X) const override { return X - B_; }

 private:
  Matrix B_;
};

SolverConfig config(Method m) {
  SolverConfig c;
  c.method = m;
  c.alpha0 = 0.5;
  c.gamma = 1.0;
  c.record_timing = false;
  return c;
}

/// Sufficient decrease of every accepted step, recomputed from the records.
void expect_descent(const RunReport& r) {
  const bool bregman = is_bregman(r.config.method);
  for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
    const IterationRecord& a = r.records[i];
    const IterationRecord& b = r.records[i + 1];
    const double bound = bregman ? -(r.config.gamma * r.lambda * a.alpha / 4.0) * a.direction_norm * a.direction_norm
                                 : -1e-4 * a.alpha * a.direction_norm * a.direction_norm;
    EXPECT_LE(b.objective() - a.objective(), bound + 1e-9 * std::max(1.0, std::abs(a.objective())))
        << "t=" << a.t;
  }
}

Matrix laplacian_eigenvectors(Index m, Index p) {
  Matrix L = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    L(i, i) = 2;
    if (i + 1 < m) L(i, i + 1) = L(i + 1, i) = -1;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(L);
  return eig.eigenvectors().leftCols(p);
}

TEST(Config, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(validate(c));
  c.rho = 1.0;
  EXPECT_THROW(validate(c), Error);
  c = SolverConfig{};
  c.gamma = 0.0;
  EXPECT_THROW(validate(c), Error);
  c = SolverConfig{};
  c.alpha0 = -1.0;
  EXPECT_THROW(validate(c), Error);
  c = SolverConfig{};
  c.method = Method::S_R_RBGD;
  c.batch_size = 0;
  EXPECT_THROW(validate(c), Error);
}

TEST(Config, MethodNames) {
  for (Method m : {Method::R_RBGD, Method::P_RBGD, Method::P_RBGD_C, Method::S_R_RBGD, Method::S_P_RBGD,
                   Method::RSD, Method::RSD_ADA}) {
    EXPECT_EQ(method_from_string(to_string(m)), m);
  }
  EXPECT_FALSE(method_from_string("newton"));
}

TEST(Solvers, StationaryStartTakesNoSteps) {
  const Index m = 30, p = 3;
  const NepvProblem P(m, p, 0.0);
  Stiefel St(m, p);
  const ManifoldPoint x0 = St.point(laplacian_eigenvectors(m, p));
  for (Method method : {Method::R_RBGD, Method::P_RBGD, Method::P_RBGD_C, Method::RSD, Method::RSD_ADA}) {
    const RunReport r = run(P, St, ReferenceFunction::quartic(), x0, config(method));
    EXPECT_EQ(r.status, RunStatus::Converged) << to_string(method);
    EXPECT_EQ(r.iterations(), 0);
    EXPECT_EQ(r.final_point, x0.ambient());
  }
}

TEST(Solvers, SphereToyConvergesMonotonically) {
  Vector a(5);
  a << 3.0, 1.0, 4.0, 0.5, 2.0;
  const DiagonalQuadratic P(a);
  Sphere S(5);
  Rng rng(1);
  const ManifoldPoint x0 = S.random_point(rng);
  for (Method method : {Method::R_RBGD, Method::P_RBGD, Method::P_RBGD_C, Method::RSD, Method::RSD_ADA}) {
    SolverConfig c = config(method);
    c.gamma = 4.0;
    c.grad_tol = 1e-6;
    const RunReport r = run(P, S, ReferenceFunction::quartic(), x0, c);
    ASSERT_EQ(r.status, RunStatus::Converged) << to_string(method) << ": " << r.message;
    EXPECT_LE(*r.last().grad_norm, 1e-6);
    // The distance to e_3 is O(|grad| / gap), which enters |x_3| and F squared.
    EXPECT_NEAR(std::abs(r.final_point(3)), 1.0, 1e-10) << to_string(method);
    EXPECT_NEAR(r.last().objective(), 0.25, 1e-10);
    EXPECT_LE(r.final_feasibility, 1e-8);
    expect_descent(r);
    for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
      EXPECT_LE(r.records[i + 1].objective(), r.records[i].objective() + 1e-15);
    }
  }
}

TEST(Solvers, ProjectedQuadraticStepIsGradientStep) {
  Vector a(3);
  a << 1.0, 2.0, 3.0;
  const DiagonalQuadratic P(a);
  Sphere S(3);
  Rng rng(2);
  const ManifoldPoint x0 = S.random_point(rng);
  SolverConfig c = config(Method::P_RBGD);
  c.gamma = 5.0;
  c.max_iters = 1;
  const RunReport r = run(P, S, ReferenceFunction::quadratic(), x0, c);
  const Matrix rg = S.project_tangent(x0, P.gradient(x0.ambient())).ambient;
  const Matrix expect = S.project(x0.ambient() - r.records[0].alpha * rg / c.gamma).ambient();
  EXPECT_LE((r.final_point - expect).norm(), 1e-15);
  EXPECT_NEAR(r.records[0].direction_norm, rg.norm() / c.gamma, 1e-15);
}

TEST(Solvers, CorrectionIsInertOnFixedRank) {
  Rng rng(3);
  FixedRank F(6, 5, 2);
  const Distance P(gaussian_matrix(6, 5, rng));
  const ManifoldPoint x0 = F.random_point(rng);
  SolverConfig c = config(Method::P_RBGD);
  c.max_iters = 40;
  const RunReport plain = run(P, F, ReferenceFunction::quartic(), x0, c);
  c.method = Method::P_RBGD_C;
  const RunReport corrected = run(P, F, ReferenceFunction::quartic(), x0, c);
  ASSERT_EQ(plain.records.size(), corrected.records.size());
  for (std::size_t i = 0; i < plain.records.size(); ++i) {
    EXPECT_NEAR(plain.records[i].f_value, corrected.records[i].f_value, 1e-12);
    EXPECT_EQ(plain.records[i].alpha, corrected.records[i].alpha);
  }
  EXPECT_LE((plain.final_point - corrected.final_point).norm(), 1e-10);
}

TEST(Solvers, RetractionAndProjectionAgreeOnFixedRank) {
  Rng rng(4);
  FixedRank F(7, 4, 2);
  const Distance P(gaussian_matrix(7, 4, rng));
  const ManifoldPoint x0 = F.random_point(rng);
  SolverConfig c = config(Method::R_RBGD);
  c.max_iters = 30;
  const RunReport a = run(P, F, ReferenceFunction::quartic(), x0, c);
  c.method = Method::P_RBGD;
  const RunReport b = run(P, F, ReferenceFunction::quartic(), x0, c);
  EXPECT_LE((a.final_point - b.final_point).norm(), 1e-9);
}

TEST(Solvers, NepvSmallAllMethods) {
  const NepvProblem P(60, 4, 10.0);
  Stiefel St(60, 4);
  Rng rng(5);
  const ManifoldPoint x0 = St.random_point(rng);
  double reference = 0.0;
  for (Method method : {Method::RSD, Method::RSD_ADA, Method::R_RBGD, Method::P_RBGD, Method::P_RBGD_C}) {
    const RunReport r = run(P, St, ReferenceFunction::quartic(), x0, config(method));
    ASSERT_EQ(r.status, RunStatus::Converged) << to_string(method) << ": " << r.message;
    EXPECT_LE(*r.last().grad_norm, 1e-4);
    EXPECT_LE(r.final_feasibility, 1e-8);
    expect_descent(r);
    if (reference == 0.0) reference = r.last().objective();
    EXPECT_NEAR(r.last().objective(), reference, 1e-6 * reference) << to_string(method);
  }
}

TEST(Solvers, NonsmoothStopsOnDirectionNorm) {
  const NepvProblem base(20, 2, 10.0);
  const RegularizedProblem P(base, NonsmoothTerm::l1(0.05));
  Stiefel St(20, 2);
  Rng rng(6);
  SolverConfig c = config(Method::R_RBGD);
  c.gamma = 4.0;
  c.grad_tol = 1e-6;
  const RunReport r = run(P, St, ReferenceFunction::quartic(), St.random_point(rng), c);
  ASSERT_EQ(r.status, RunStatus::Converged) << r.message;
  EXPECT_FALSE(r.last().grad_norm.has_value());
  EXPECT_LE(r.last().direction_norm, 1e-6);
  EXPECT_GT(r.last().g_value, 0.0);
  expect_descent(r);
  c.method = Method::P_RBGD;
  EXPECT_THROW(run(P, St, ReferenceFunction::quartic(), St.random_point(rng), c), Error);
}

TEST(Solvers, BarrierReferenceShrinksOutOfDomainSteps) {
  Vector a(4);
  a << 2.0, 1.0, 1.5, 3.0;
  const DiagonalQuadratic P(a);
  Sphere S(4);
  const ManifoldPoint x0 = S.point(Matrix::Constant(4, 1, 0.5));
  SolverConfig c = config(Method::R_RBGD);
  c.alpha0 = 1.0;
  c.max_iters = 200;
  const RunReport r = run(P, S, ReferenceFunction::log_barrier({0.0, 1.0}), x0, c);
  EXPECT_NE(r.status, RunStatus::NumericalError) << r.message;
  EXPECT_TRUE((r.final_point.array() > 0.0).all());
  expect_descent(r);
}

TEST(Solvers, StatusReporting) {
  const NepvProblem P(40, 3, 10.0);
  Stiefel St(40, 3);
  Rng rng(7);
  const ManifoldPoint x0 = St.random_point(rng);
  SolverConfig c = config(Method::R_RBGD);
  c.max_iters = 3;
  RunReport r = run(P, St, ReferenceFunction::quartic(), x0, c);
  EXPECT_EQ(r.status, RunStatus::MaxIters);
  EXPECT_EQ(r.iterations(), 3);
  EXPECT_EQ(r.records.back().alpha, 0.0);
  EXPECT_EQ(r.final_checksum, checksum(r.final_point));

  // One trial at a huge step cannot pass the test.
  c = config(Method::R_RBGD);
  c.alpha0 = 1e6;
  c.max_shrinks = 0;
  r = run(P, St, ReferenceFunction::quartic(), x0, c);
  EXPECT_EQ(r.status, RunStatus::LinesearchFailure);
  EXPECT_EQ(r.iterations(), 0);
}

TEST(Solvers, TimingCanBeDisabled) {
  const NepvProblem P(20, 2, 10.0);
  Stiefel St(20, 2);
  Rng rng(8);
  const RunReport r = run(P, St, ReferenceFunction::quartic(), St.random_point(rng), config(Method::RSD));
  for (const IterationRecord& rec : r.records) EXPECT_EQ(rec.wall_ns, 0);
  EXPECT_EQ(r.total_wall_ns, 0);
}

TEST(Solvers, DeterministicReplay) {
  const NepvProblem P(50, 3, 10.0);
  Stiefel St(50, 3);
  Rng a(9), b(9);
  const RunReport r1 = run(P, St, ReferenceFunction::quartic(), St.random_point(a), config(Method::P_RBGD_C));
  const RunReport r2 = run(P, St, ReferenceFunction::quartic(), St.random_point(b), config(Method::P_RBGD_C));
  EXPECT_EQ(r1.final_checksum, r2.final_checksum);
  EXPECT_EQ(r1.records.size(), r2.records.size());
}

class StochasticTest : public ::testing::Test {
 protected:
  StochasticTest() : rng_(10), P_(generate_sensing(20, 2, 40, rng_)), S_(20, 2) {}

  SolverConfig stochastic(Method m) const {
    SolverConfig c = config(m);
    c.gamma = 50.0;
    c.fixed_alpha = 0.2;
    c.max_iters = 60;
    c.batch_size = 5;
    c.seed = 3;
    return c;
  }

  Rng rng_;
  SensingProblem P_;
  Sphere S_;
};

TEST_F(StochasticTest, FullBatchMatchesDeterministicFixedStep) {
  const ManifoldPoint x0 = S_.random_point(rng_);
  for (auto [sm, dm] : {std::pair{Method::S_R_RBGD, Method::R_RBGD}, std::pair{Method::S_P_RBGD, Method::P_RBGD}}) {
    SolverConfig sc = stochastic(sm);
    sc.enumerate_batches = true;
    SolverConfig dc = sc;
    dc.method = dm;
    dc.linesearch = false;
    dc.alpha0 = sc.fixed_alpha;
    const RunReport s = run(P_, S_, ReferenceFunction::quartic(), x0, sc);
    const RunReport d = run(P_, S_, ReferenceFunction::quartic(), x0, dc);
    ASSERT_EQ(s.records.size(), d.records.size()) << s.message << " / " << d.message;
    for (std::size_t i = 0; i < s.records.size(); ++i) {
      EXPECT_EQ(s.records[i].f_value, d.records[i].f_value);
      // The final record of a stochastic run draws no batch.
      if (i + 1 < s.records.size()) {
        EXPECT_EQ(s.records[i].direction_norm, d.records[i].direction_norm);
      }
    }
    EXPECT_EQ(s.final_checksum, d.final_checksum);
  }
}

TEST_F(StochasticTest, SameSeedSameReport) {
  const ManifoldPoint x0 = S_.random_point(rng_);
  const RunReport a = run(P_, S_, ReferenceFunction::quartic(), x0, stochastic(Method::S_R_RBGD));
  const RunReport b = run(P_, S_, ReferenceFunction::quartic(), x0, stochastic(Method::S_R_RBGD));
  EXPECT_EQ(a.final_checksum, b.final_checksum);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].zeta_sq_mean, b.records[i].zeta_sq_mean);
  }
  SolverConfig other = stochastic(Method::S_R_RBGD);
  other.seed = 4;
  EXPECT_NE(run(P_, S_, ReferenceFunction::quartic(), x0, other).final_checksum, a.final_checksum);
}

TEST_F(StochasticTest, ReportsRunningZetaMean) {
  const ManifoldPoint x0 = S_.random_point(rng_);
  const RunReport r = run(P_, S_, ReferenceFunction::quartic(), x0, stochastic(Method::S_P_RBGD));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
    sum += r.records[i].direction_norm * r.records[i].direction_norm;
    EXPECT_NEAR(*r.records[i].zeta_sq_mean, sum / static_cast<double>(i + 1), 1e-12 * sum);
    EXPECT_EQ(r.records[i].alpha, 0.2);
  }
  EXPECT_LE(r.final_feasibility, 1e-8);
}

TEST_F(StochasticTest, RejectsNonCompactManifold) {
  FixedRank F(20, 2, 2);
  const ManifoldPoint x0 = F.random_point(rng_);
  EXPECT_THROW(run(P_, F, ReferenceFunction::quartic(), x0, stochastic(Method::S_R_RBGD)), Error);
}

TEST_F(StochasticTest, NeedsMinibatchOracle) {
  const NepvProblem P(20, 2, 1.0);
  Stiefel St(20, 2);
  EXPECT_THROW(run(P, St, ReferenceFunction::quartic(), St.random_point(rng_), stochastic(Method::S_R_RBGD)),
               Error);
}

}  // namespace
}  // namespace rbgd
