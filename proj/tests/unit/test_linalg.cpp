#include "mvdmf/linalg.hpp"
#include "mvdmf/parallel.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

using namespace mvdmf;

TEST(PseudoInverse, FullRankMatchesInverse) {
  const Matrix B = testutil::gaussian(5, 8, 11);
  const Matrix G = B * B.transpose();
  Index rank = 0;
  const Matrix P = spd_pseudo_inverse(G, &rank);
  EXPECT_EQ(rank, 5);
  const Matrix I = oracle::gauss_solve(G, Matrix::Identity(5, 5));
  EXPECT_LT((P - I).norm(), 1e-9 * I.norm());
}

TEST(PseudoInverse, RankDeficientSatisfiesPenroseConditions) {
  const Matrix B = testutil::gaussian(6, 3, 5);
  const Matrix G = B * B.transpose();  // rank 3
  Index rank = 0;
  const Matrix P = spd_pseudo_inverse(G, &rank);
  EXPECT_EQ(rank, 3);
  EXPECT_LT((G * P * G - G).norm(), 1e-9 * G.norm());
  EXPECT_LT((P * G * P - P).norm(), 1e-9 * P.norm());
  EXPECT_LT((P - P.transpose()).norm(), 1e-12 * P.norm());
  EXPECT_TRUE(spd_pseudo_inverse(Matrix::Zero(3, 3)).isZero());
}

TEST(Parts, SplitAndStep) {
  Matrix A(2, 2);
  A << 1, -2, 0, 3;
  Matrix plus(2, 2), minus(2, 2);
  plus << 1, 0, 0, 3;
  minus << 0, 2, 0, 0;
  EXPECT_EQ(positive_part(A), plus);
  EXPECT_EQ(negative_part(A), minus);

  Matrix H(1, 3);
  H << 0.0, 2.0, 1.0;
  Matrix num(1, 3), den(1, 3);
  num << 1, 4, 0;
  den << 1, 1, 0;  // zero denominator floored
  const Matrix out = multiplicative_step(H, num, den);
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out(0, 1), 4.0);
  EXPECT_EQ(out(0, 2), 0.0);
}

TEST(Seeds, DeterministicAndDistinct) {
  EXPECT_EQ(random_positive(3, 4, 9), random_positive(3, 4, 9));
  EXPECT_NE(random_positive(3, 4, 9), random_positive(3, 4, 10));
  const Matrix R = random_positive(50, 50, 1);
  EXPECT_GT(R.minCoeff(), 0.0);
  EXPECT_LE(R.maxCoeff(), 1.0);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  std::atomic<int> ran{0};
  EXPECT_THROW(parallel_for(10, 3,
                            [&](std::size_t i) {
                              ++ran;
                              if (i == 4) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_EQ(ran.load(), 10);
}
