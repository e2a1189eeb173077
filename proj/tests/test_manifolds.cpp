#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <rbgd/errors.hpp>
#include <rbgd/manifold.hpp>

namespace rbgd {
namespace {

struct Case {
  const char* name;
  std::function<std::unique_ptr<Manifold>()> make;
};

std::vector<Case> cases() {
  return {
      {"sphere5", [] { return std::make_unique<Sphere>(5); }},
      {"sphere4x3", [] { return std::make_unique<Sphere>(4, 3); }},
      {"stiefel6x3", [] { return std::make_unique<Stiefel>(6, 3); }},
      {"stiefel4x4", [] { return std::make_unique<Stiefel>(4, 4); }},
      {"fixedrank6x5r2", [] { return std::make_unique<FixedRank>(6, 5, 2); }},
      {"fixedrank7x3r3", [] { return std::make_unique<FixedRank>(7, 3, 3); }},
  };
}

class ManifoldProperties : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    c_ = cases()[static_cast<std::size_t>(GetParam())];
    M_ = c_.make();
  }
  Case c_;
  std::unique_ptr<Manifold> M_;
};

TEST_P(ManifoldProperties, RandomPointFeasibleAndDeterministic) {
  Rng a(5), b(5);
  const ManifoldPoint x = M_->random_point(a);
  EXPECT_LE(M_->feasibility_residual(x.ambient()), 1e-12);
  EXPECT_EQ(x.ambient(), M_->random_point(b).ambient());
}

TEST_P(ManifoldProperties, TangentNormalDecomposition) {
  Rng rng(101);
  for (int k = 0; k < 100; ++k) {
    const ManifoldPoint x = M_->random_point(rng);
    const Matrix w = gaussian_matrix(M_->rows(), M_->cols(), rng);
    const Matrix w2 = gaussian_matrix(M_->rows(), M_->cols(), rng);
    const TangentVector t = M_->project_tangent(x, w);
    const TangentVector n = M_->project_normal(x, w);
    EXPECT_EQ(t.space, VectorSpace::Tangent);
    EXPECT_EQ(n.space, VectorSpace::Normal);
    EXPECT_LE((t.ambient + n.ambient - w).norm(), 1e-12 * std::max(1.0, w.norm()));
    EXPECT_LE(std::abs((t.ambient.array() * n.ambient.array()).sum()), 1e-12 * w.squaredNorm());
    // Normal part is orthogonal to the tangent space, not only to t.
    const Matrix t2 = M_->project_tangent(x, w2).ambient;
    EXPECT_LE(std::abs((t2.array() * n.ambient.array()).sum()), 1e-10 * w.norm() * w2.norm());
    EXPECT_LE((M_->project_tangent(x, t.ambient).ambient - t.ambient).norm(), 1e-12 * w.norm());
  }
}

TEST_P(ManifoldProperties, RetractZeroIsIdentity) {
  Rng rng(7);
  const ManifoldPoint x = M_->random_point(rng);
  const TangentVector zero = M_->project_tangent(x, Matrix::Zero(M_->rows(), M_->cols()));
  EXPECT_EQ(M_->retract(x, zero).ambient(), x.ambient());
}

TEST_P(ManifoldProperties, RetractionIsSecondOrderRigid) {
  Rng rng(8);
  for (int k = 0; k < 5; ++k) {
    const ManifoldPoint x = M_->random_point(rng);
    Matrix v = M_->project_tangent(x, gaussian_matrix(M_->rows(), M_->cols(), rng)).ambient;
    v /= v.norm();
    std::vector<double> lt, le;
    double emax = 0.0;
    for (double t : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const TangentVector tv = M_->project_tangent(x, t * v);
      const ManifoldPoint y = M_->retract(x, tv);
      EXPECT_LE(M_->feasibility_residual(y.ambient()), 1e-10);
      const double e = (y.ambient() - x.ambient() - tv.ambient).norm();
      emax = std::max(emax, e);
      lt.push_back(std::log10(t));
      le.push_back(std::log10(std::max(e, 1e-300)));
    }
    if (emax < 1e-14) continue;  // retraction is x + v here (open manifold)
    // Least-squares slope over the first three points; the last one sits near
    // rounding level for some geometries.
    double mt = 0, me = 0;
    for (int i = 0; i < 3; ++i) mt += lt[i] / 3, me += le[i] / 3;
    double num = 0, den = 0;
    for (int i = 0; i < 3; ++i) num += (lt[i] - mt) * (le[i] - me), den += (lt[i] - mt) * (lt[i] - mt);
    EXPECT_NEAR(num / den, 2.0, 0.1);
  }
}

TEST_P(ManifoldProperties, ProjectionIdempotent) {
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const Matrix w = gaussian_matrix(M_->rows(), M_->cols(), rng);
    const ManifoldPoint p = M_->project(w);
    EXPECT_LE((M_->project(p.ambient()).ambient() - p.ambient()).norm(), 1e-12 * std::max(1.0, w.norm()));
  }
}

TEST_P(ManifoldProperties, ProjectionUndoesSmallNormalOffsets) {
  Rng rng(10);
  for (int k = 0; k < 20; ++k) {
    const ManifoldPoint x = M_->random_point(rng);
    Matrix u;
    if (M_->kind() == ManifoldKind::Stiefel) {
      const Matrix A = gaussian_matrix(M_->cols(), M_->cols(), rng);
      u = x.ambient() * (A + A.transpose());
    } else {
      u = M_->project_normal(x, gaussian_matrix(M_->rows(), M_->cols(), rng)).ambient;
    }
    if (u.norm() < 1e-13) continue;  // normal space is trivial
    u *= 0.01 * x.ambient().norm() / u.norm() * (k % 2 ? -1.0 : 1.0);
    EXPECT_LE((M_->project(x.ambient() + u).ambient() - x.ambient()).norm(), 1e-9);
  }
}

TEST_P(ManifoldProperties, RejectsInfeasiblePoint) {
  EXPECT_THROW(M_->point(Matrix::Zero(M_->rows(), M_->cols())), Error);
}

TEST_P(ManifoldProperties, RetractRejectsForeignVector) {
  Rng rng(12);
  const ManifoldPoint x = M_->random_point(rng);
  const ManifoldPoint y = M_->random_point(rng);
  const TangentVector v = M_->project_tangent(y, gaussian_matrix(M_->rows(), M_->cols(), rng));
  EXPECT_THROW(M_->retract(x, v), Error);
}

INSTANTIATE_TEST_SUITE_P(All, ManifoldProperties, ::testing::Range(0, 6),
                         [](const auto& info) { return cases()[static_cast<std::size_t>(info.param)].name; });

Matrix vec(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double d : v) m(i++, 0) = d;
  return m;
}

TEST(SphereExamples, RetractAndProject) {
  Sphere S(2);
  const ManifoldPoint x = S.point(vec({1, 0}));
  const ManifoldPoint y = S.retract(x, S.project_tangent(x, vec({0, 1})));
  EXPECT_NEAR(y.ambient()(0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(y.ambient()(1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(S.project(vec({0, 2})).ambient(), vec({0, 1}));
  EXPECT_EQ(S.project(vec({1.1, 0})).ambient(), vec({1, 0}));
  EXPECT_EQ(S.project_tangent(x, x.ambient()).ambient, vec({0, 0}));
  EXPECT_EQ(S.project_normal(x, x.ambient()).ambient, x.ambient());
}

TEST(SphereExamples, ProjectingZeroFails) {
  Sphere S(2);
  try {
    S.project(vec({0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RetractionDomain);
  }
}

TEST(StiefelExamples, ProjectionOfPointIsZero) {
  Stiefel St(5, 2);
  Rng rng(1);
  const ManifoldPoint X = St.random_point(rng);
  EXPECT_LE(St.project_tangent(X, X.ambient()).ambient.norm(), 1e-14);
  EXPECT_LE((X.ambient().transpose() * X.ambient() - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(StiefelExamples, RankDeficientProjectionFails) {
  Stiefel St(4, 2);
  Matrix W = Matrix::Zero(4, 2);
  W(0, 0) = W(0, 1) = 1.0;
  EXPECT_THROW(St.project(W), Error);
}

TEST(FixedRankExamples, TruncatesDiagonal) {
  FixedRank F(2, 2, 1);
  Matrix w(2, 2);
  w << 3, 0, 0, 1;
  Matrix expect(2, 2);
  expect << 3, 0, 0, 0;
  EXPECT_LE((F.project(w).ambient() - expect).norm(), 1e-14);
}

TEST(FixedRankExamples, PointIsTangent) {
  FixedRank F(6, 5, 2);
  Rng rng(4);
  const ManifoldPoint X = F.random_point(rng);
  EXPECT_LE((F.project_tangent(X, X.ambient()).ambient - X.ambient()).norm(), 1e-12);
  EXPECT_LE(F.project_normal(X, X.ambient()).ambient.norm(), 1e-12);
}

TEST(FixedRankExamples, FullColumnRankTangentIsEverything) {
  FixedRank F(7, 3, 3);
  Rng rng(4);
  const ManifoldPoint X = F.random_point(rng);
  const Matrix w = gaussian_matrix(7, 3, rng);
  EXPECT_LE((F.project_tangent(X, w).ambient - w).norm(), 1e-12);
}

TEST(FixedRankExamples, RankCollapseFails) {
  FixedRank F(3, 3, 2);
  Matrix w = Matrix::Zero(3, 3);
  w(0, 0) = 1.0;
  try {
    F.project(w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RetractionDomain);
  }
}

TEST(ManifoldFactory, InvalidDims) {
  EXPECT_THROW(Sphere(1), Error);
  EXPECT_THROW(Stiefel(2, 3), Error);
  EXPECT_THROW(FixedRank(3, 3, 4), Error);
}

}  // namespace
}  // namespace rbgd
