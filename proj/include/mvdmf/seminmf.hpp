#pragma once

#include "mvdmf/linalg.hpp"
#include "mvdmf/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mvdmf {

struct SemiNmfResult {
  Matrix Z;         // d x l, mixed sign
  Matrix H;         // l x n, nonnegative
  double residual;  // ||X - Z H||_F of the returned factors
  int iters;
  std::vector<double> history;  // residual after each sweep
  int rank_deficient = 0;       // basis solves with singular H H^T
};

// (max(A, 0), max(-A, 0)); A = plus - minus.
std::pair<Matrix, Matrix> pos_neg_split(const Matrix& A);

// Least-squares basis for fixed H: Z = X H^T (H H^T)^{-1}. A singular H H^T
// is replaced by its pseudo-inverse (minimum-norm solution) and counted in info.
Matrix update_basis(const Matrix& X, const Matrix& H, SolveInfo* info = nullptr);

// One KKT multiplicative sweep of H for fixed Z.
Matrix update_representation(const Matrix& X, const Matrix& Z, const Matrix& H);

// Alternates update_basis / update_representation from a seeded random H.
// Stops early once the relative residual change drops below rel_tol.
SemiNmfResult fit_seminmf(const Matrix& X, Index width, int iters, std::uint64_t seed,
                          double rel_tol = 1e-6);

}  // namespace mvdmf
