#include "mvdmf/seminmf.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace mvdmf;

TEST(PosNegSplit, Examples) {
  Matrix A(2, 2);
  A << 1, -2, 0, 3;
  const auto [plus, minus] = pos_neg_split(A);
  Matrix ep(2, 2), em(2, 2);
  ep << 1, 0, 0, 3;
  em << 0, 2, 0, 0;
  EXPECT_EQ(plus, ep);
  EXPECT_EQ(minus, em);

  const auto [zp, zm] = pos_neg_split(Matrix::Zero(3, 4));
  EXPECT_TRUE(zp.isZero(0.0));
  EXPECT_TRUE(zm.isZero(0.0));
}

TEST(PosNegSplit, ReconstructsExactly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix A = testutil::gaussian(5, 5, seed);
    const auto [plus, minus] = pos_neg_split(A);
    EXPECT_EQ(plus - minus, A);
    EXPECT_GE(plus.minCoeff(), 0.0);
    EXPECT_GE(minus.minCoeff(), 0.0);
    EXPECT_EQ(plus.cwiseProduct(minus).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(UpdateBasis, ConsistentSystem) {
  const Matrix Z0 = testutil::gaussian(8, 3, 1);
  const Matrix H0 = testutil::uniform(3, 20, 2, 0.1, 1.0);
  const Matrix X = Z0 * H0;
  const Matrix Z = update_basis(X, H0);
  EXPECT_LT((X - Z * H0).norm(), 1e-10);
}

TEST(UpdateBasis, IdentityRepresentation) {
  const Matrix X = testutil::gaussian(4, 6, 3);
  EXPECT_LT((update_basis(X, Matrix::Identity(6, 6)) - X).norm(), 1e-12);
}

TEST(UpdateBasis, MatchesNormalEquationsOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix X = testutil::gaussian(8, 20, 100 + seed);
    const Matrix H = testutil::uniform(3, 20, 200 + seed);
    const Matrix Z = update_basis(X, H);
    const Matrix ref = oracle::least_squares_basis(X, H);
    EXPECT_LT((Z - ref).cwiseAbs().maxCoeff(), 1e-9) << "seed " << seed;
  }
}

TEST(UpdateBasis, ResidualOrthogonalToRows) {
  const Matrix X = testutil::gaussian(7, 30, 4);
  const Matrix H = testutil::uniform(4, 30, 5);
  const Matrix Z = update_basis(X, H);
  EXPECT_LT(((X - Z * H) * H.transpose()).norm(), 1e-8 * X.norm());
}

TEST(UpdateBasis, PerturbationNeverHelps) {
  const Matrix X = testutil::gaussian(6, 15, 6);
  const Matrix H = testutil::uniform(3, 15, 7);
  const Matrix Z = update_basis(X, H);
  const double base = (X - Z * H).norm();
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Matrix D = testutil::perturbation(6, 3, 1000 + t, 1e-3);
    EXPECT_GE((X - (Z + D) * H).norm(), base - 1e-12);
  }
}

TEST(UpdateBasis, CollapsedRepresentationIsFlagged) {
  Matrix H = testutil::uniform(3, 10, 8);
  H.row(2) = H.row(0);
  SolveInfo info;
  const Matrix Z = update_basis(testutil::gaussian(5, 10, 9), H, &info);
  EXPECT_EQ(info.rank_deficient, 1);
  EXPECT_TRUE(Z.allFinite());
}

TEST(UpdateRepresentation, FixedPoint) {
  const Matrix Z = testutil::gaussian(8, 3, 10);
  const Matrix H = testutil::uniform(3, 12, 11, 0.2, 1.0);
  const Matrix out = update_representation(Z * H, Z, H);
  EXPECT_LT((out - H).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(UpdateRepresentation, ZeroRowStaysZero) {
  const Matrix X = testutil::gaussian(6, 12, 12);
  Matrix H = testutil::uniform(3, 12, 13);
  H.row(1).setZero();
  const Matrix Z = update_basis(X, H);
  const Matrix out = update_representation(X, Z, H);
  EXPECT_EQ(out.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GE(out.minCoeff(), 0.0);
}

TEST(UpdateRepresentation, NonnegativeOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix X = testutil::gaussian(5, 9, seed);
    const Matrix Z = testutil::gaussian(5, 3, seed + 500);
    const Matrix H = testutil::uniform(3, 9, seed + 900);
    EXPECT_GE(update_representation(X, Z, H).minCoeff(), 0.0);
  }
}

TEST(SemiNmf, MonotoneSweeps) {
  const Matrix X = testutil::gaussian(6, 12, 14);
  Matrix H = testutil::uniform(3, 12, 15);
  Matrix Z = update_basis(X, H);
  double prev = (X - Z * H).norm();
  for (int sweep = 0; sweep < 50; ++sweep) {
    Z = update_basis(X, H);
    H = update_representation(X, Z, H);
    const double r = (X - Z * H).norm();
    EXPECT_LE(r, prev + 1e-10) << "sweep " << sweep;
    prev = r;
  }
}

TEST(SemiNmf, RecoversPlantedBlocks) {
  // Two groups of 10 samples living on disjoint feature blocks.
  Matrix X = Matrix::Zero(8, 20);
  const Matrix noise = testutil::uniform(8, 20, 16, 0.0, 0.05);
  for (Index j = 0; j < 20; ++j)
    for (Index i = 0; i < 4; ++i) X(j < 10 ? i : i + 4, j) = 1.0;
  X += noise;
  const SemiNmfResult r = fit_seminmf(X, 2, 200, 3);
  std::vector<int> arg(20);
  for (Index j = 0; j < 20; ++j) arg[j] = r.H(0, j) > r.H(1, j) ? 0 : 1;
  for (Index j = 1; j < 10; ++j) EXPECT_EQ(arg[j], arg[0]);
  for (Index j = 11; j < 20; ++j) EXPECT_EQ(arg[j], arg[10]);
  EXPECT_NE(arg[0], arg[10]);
}

TEST(SemiNmf, LoopContractAndDeterminism) {
  const Matrix X = testutil::gaussian(6, 10, 17);
  const SemiNmfResult one = fit_seminmf(X, 3, 1, 5);
  EXPECT_EQ(one.history.size(), 1u);
  EXPECT_EQ(one.iters, 1);

  const SemiNmfResult a = fit_seminmf(X, 3, 40, 5);
  const SemiNmfResult b = fit_seminmf(X, 3, 40, 5);
  EXPECT_EQ(a.Z, b.Z);
  EXPECT_EQ(a.H, b.H);
  EXPECT_EQ(a.history, b.history);
  EXPECT_NEAR(a.residual, (X - a.Z * a.H).norm(), 1e-10 * X.norm());
  EXPECT_GE(a.H.minCoeff(), 0.0);
  EXPECT_LE(a.history.size(), 40u);
}

TEST(SemiNmf, RejectsBadWidth) {
  const Matrix X = testutil::gaussian(4, 10, 18);
  EXPECT_ANY_THROW(fit_seminmf(X, 5, 10, 0));
  EXPECT_ANY_THROW(fit_seminmf(X, 0, 10, 0));
  EXPECT_ANY_THROW(fit_seminmf(X, 2, 0, 0));
}
