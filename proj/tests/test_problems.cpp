#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <rbgd/errors.hpp>
#include <rbgd/manifold.hpp>
#include <rbgd/problems.hpp>

#include "oracles.hpp"

namespace rbgd {
namespace {

double fd_rel_error(const Problem& P, const Matrix& X) {
  const double h = 1e-5 * std::max(1.0, X.norm());
  const Matrix fd = oracle::fd_gradient([&](const Matrix& Y) { return P.value(Y); }, X, h);
  return oracle::rel_err(P.gradient(X), fd);
}

TEST(Nepv, ScalarCase) {
  const NepvProblem P(1, 1, 10.0);
  const Matrix X = Matrix::Ones(1, 1);
  EXPECT_DOUBLE_EQ(P.value(X), 2.25);
  EXPECT_DOUBLE_EQ(P.gradient(X)(0, 0), 7.0);
}

TEST(Nepv, ZeroBetaIsKinetic) {
  Rng rng(1);
  const Matrix X = gaussian_matrix(8, 3, rng);
  const NepvProblem P(8, 3, 0.0);
  Matrix L = Matrix::Zero(8, 8);
  for (Index i = 0; i < 8; ++i) {
    L(i, i) = 2;
    if (i + 1 < 8) L(i, i + 1) = L(i + 1, i) = -1;
  }
  EXPECT_NEAR(P.value(X), 0.5 * (X.transpose() * L * X).trace(), 1e-12);
}

TEST(Nepv, DenseReference) {
  Rng rng(2);
  const Index m = 12, p = 3;
  const double beta = 10.0;
  const Matrix X = gaussian_matrix(m, p, rng);
  Matrix L = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    L(i, i) = 2;
    if (i + 1 < m) L(i, i + 1) = L(i + 1, i) = -1;
  }
  const Vector rho = (X * X.transpose()).diagonal();
  const Vector w = oracle::dense_solve(L, rho);
  const NepvProblem P(m, p, beta);
  EXPECT_NEAR(P.value(X), 0.5 * (X.transpose() * L * X).trace() + 0.25 * beta * rho.dot(w), 1e-10);
  EXPECT_LE((P.gradient(X) - (L * X + beta * w.asDiagonal() * X)).norm(), 1e-10);
}

TEST(Nepv, ZeroPointHasZeroGradient) {
  const NepvProblem P(10, 2, 10.0);
  EXPECT_EQ(P.gradient(Matrix::Zero(10, 2)).norm(), 0.0);
}

TEST(Nepv, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  const NepvProblem P(20, 3, 10.0);
  Stiefel St(20, 3);
  for (int k = 0; k < 20; ++k) {
    EXPECT_LE(fd_rel_error(P, St.random_point(rng).ambient()), 1e-6);
  }
}

TEST(Nepv, InvariantUnderOrthogonalMixing) {
  Rng rng(4);
  const NepvProblem P(30, 4, 10.0);
  Stiefel St(30, 4), Q4(4, 4);
  for (int k = 0; k < 10; ++k) {
    const Matrix X = St.random_point(rng).ambient();
    const Matrix Q = Q4.random_point(rng).ambient();
    const double f = P.value(X);
    EXPECT_NEAR(P.value(X * Q), f, 1e-9 * std::abs(f));
  }
}

TEST(Nepv, ValueChangeMatchesDifference) {
  Rng rng(5);
  const NepvProblem P(40, 5, 10.0);
  const Matrix X = gaussian_matrix(40, 5, rng);
  const Matrix Y = X + 1e-3 * gaussian_matrix(40, 5, rng);
  EXPECT_NEAR(P.value_change(Y, X), P.value(Y) - P.value(X), 1e-9 * std::abs(P.value(X)));
  EXPECT_EQ(P.value_change(X, X), 0.0);
}

TEST(Nepv, RejectsBadDimensions) {
  EXPECT_THROW(NepvProblem(2, 3, 1.0), Error);
  EXPECT_THROW(NepvProblem(3, 2, -1.0), Error);
}

TEST(Sensing, GroundTruthIsGlobalMinimum) {
  Rng rng(6);
  const SensingProblem P = generate_sensing(30, 2, 100, rng);
  EXPECT_LE(P.value(P.ground_truth()), 1e-18 * P.targets().squaredNorm());
  EXPECT_LE(P.gradient(P.ground_truth()).norm(), 1e-9 * P.design().squaredNorm());
  EXPECT_GE(P.targets().minCoeff(), 0.0);
  EXPECT_EQ(P.recovery_error(P.ground_truth()), 0.0);
}

TEST(Sensing, SingleMeasurementHandCase) {
  const Index m = 3;
  Matrix Y = Matrix::Zero(1, m);
  Y(0, 0) = 1.0;
  Matrix Xs(m, 1);
  Xs << 2, 0, 0;
  const SensingProblem P(Y, Vector::Constant(1, 4.0), Xs);
  Matrix X(m, 1);
  X << 3, 1, -1;
  // f = 1/2 (X_11^2 - 4)^2, df/dX_11 = 2 (X_11^2 - 4) X_11.
  EXPECT_DOUBLE_EQ(P.value(X), 12.5);
  Matrix g = Matrix::Zero(m, 1);
  g(0) = 30.0;
  EXPECT_EQ(P.gradient(X), g);
}

TEST(Sensing, GradientMatchesFiniteDifferences) {
  Rng rng(7);
  const SensingProblem P = generate_sensing(30, 2, 100, rng);
  for (int k = 0; k < 20; ++k) {
    EXPECT_LE(fd_rel_error(P, gaussian_matrix(30, 2, rng)), 1e-6);
  }
}

TEST(Sensing, ValueChangeMatchesDifference) {
  Rng rng(8);
  const SensingProblem P = generate_sensing(20, 3, 50, rng);
  const Matrix X = gaussian_matrix(20, 3, rng);
  const Matrix Y = X + 1e-2 * gaussian_matrix(20, 3, rng);
  EXPECT_NEAR(P.value_change(Y, X), P.value(Y) - P.value(X), 1e-9 * P.value(X));
}

TEST(Sensing, SameSeedSameInstance) {
  Rng a(9), b(9);
  const SensingProblem P = generate_sensing(10, 2, 20, a);
  const SensingProblem Q = generate_sensing(10, 2, 20, b);
  EXPECT_EQ(P.design(), Q.design());
  EXPECT_EQ(P.targets(), Q.targets());
  EXPECT_EQ(P.ground_truth(), Q.ground_truth());
}

TEST(Minibatch, EnumerationIsExactFullGradient) {
  Rng rng(10);
  const SensingProblem P = generate_sensing(15, 2, 40, rng);
  const Matrix X = gaussian_matrix(15, 2, rng);
  MinibatchOracle O(P, Rng(1));
  EXPECT_EQ(O.enumerate(X), P.gradient(X));
}

TEST(Minibatch, SingleSampleAverageIsFullGradient) {
  Rng rng(11);
  const SensingProblem P = generate_sensing(15, 2, 40, rng);
  const Matrix X = gaussian_matrix(15, 2, rng);
  Matrix mean = Matrix::Zero(15, 2);
  for (Index j = 0; j < P.sample_count(); ++j) {
    const Index idx[] = {j};
    mean += P.sample_gradient(X, idx);
  }
  mean /= static_cast<double>(P.sample_count());
  EXPECT_LE((mean - P.gradient(X)).norm(), 1e-12 * P.gradient(X).norm());
}

TEST(Minibatch, SeedDeterminism) {
  Rng rng(12);
  const SensingProblem P = generate_sensing(15, 2, 40, rng);
  const Matrix X = gaussian_matrix(15, 2, rng);
  MinibatchOracle a(P, Rng(5)), b(P, Rng(5));
  for (int k = 0; k < 5; ++k) EXPECT_EQ(a.gradient(X, 7), b.gradient(X, 7));
}

TEST(Minibatch, DrawsAreInRange) {
  Rng rng(13);
  const SensingProblem P = generate_sensing(5, 1, 7, rng);
  MinibatchOracle O(P, Rng(3));
  std::vector<int> hits(7, 0);
  for (Index j : O.draw(7000)) {
    ASSERT_GE(j, 0);
    ASSERT_LT(j, 7);
    ++hits[static_cast<std::size_t>(j)];
  }
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
  EXPECT_THROW(O.draw(0), Error);
}

TEST(Descriptor, JsonRoundTrip) {
  ProblemDescriptor d;
  d.kind = ProblemKind::Sensing;
  d.m = 12;
  d.p = 2;
  d.N = 30;
  d.seed = 77;
  const ProblemDescriptor e = problem_descriptor_from_json(to_json(d));
  EXPECT_EQ(e.kind, d.kind);
  EXPECT_EQ(e.m, d.m);
  EXPECT_EQ(e.p, d.p);
  EXPECT_EQ(e.N, d.N);
  EXPECT_EQ(e.seed, d.seed);
  const auto a = instantiate(d);
  const auto b = instantiate(e);
  Rng rng(1);
  const Matrix X = gaussian_matrix(12, 2, rng);
  EXPECT_EQ(a->value(X), b->value(X));
  EXPECT_THROW(problem_descriptor_from_json("{\"kind\": 3}"), Error);
  EXPECT_THROW(problem_descriptor_from_json("not json"), Error);
}

}  // namespace
}  // namespace rbgd
