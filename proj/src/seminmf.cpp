#include "mvdmf/seminmf.hpp"

#include "mvdmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvdmf {

std::pair<Matrix, Matrix> pos_neg_split(const Matrix& A) {
  return {positive_part(A), negative_part(A)};
}

Matrix update_basis(const Matrix& X, const Matrix& H, SolveInfo* info) {
  if (X.cols() != H.cols())
    throw DimensionMismatch("update_basis: X and H disagree on sample count");
  Index rank = 0;
  const Matrix inverse = spd_pseudo_inverse(H * H.transpose(), &rank);
  if (rank < H.rows() && info) ++info->rank_deficient;
  return (X * H.transpose()) * inverse;
}

Matrix update_representation(const Matrix& X, const Matrix& Z, const Matrix& H) {
  if (Z.rows() != X.rows() || Z.cols() != H.rows() || X.cols() != H.cols())
    throw DimensionMismatch("update_representation: incompatible shapes");
  return kkt_representation_step(H, Z.transpose() * X, Z.transpose() * Z);
}

SemiNmfResult fit_seminmf(const Matrix& X, Index width, int iters, std::uint64_t seed,
                          double rel_tol) {
  if (width < 1 || width > std::min(X.rows(), X.cols()))
    throw InvalidArgument("semi-NMF width " + std::to_string(width) +
                          " outside [1, min(d, n)]");
  if (iters < 1) throw InvalidArgument("semi-NMF needs at least one iteration");

  const double scale = X.norm() / static_cast<double>(width * X.cols());
  Matrix H = random_positive(width, X.cols(), seed) * (scale > 0.0 ? scale : 1.0);

  SemiNmfResult result;
  SolveInfo info;
  Matrix Z;
  double previous = -1.0;
  for (int it = 0; it < iters; ++it) {
    Z = update_basis(X, H, &info);
    H = update_representation(X, Z, H);
    const double residual = (X - Z * H).norm();
    result.history.push_back(residual);
    if (previous >= 0.0 &&
        std::abs(previous - residual) <= rel_tol * std::max(previous, 1e-300))
      break;
    previous = residual;
  }
  // Fix the scale ambiguity Z H = (Z D)(D^{-1} H): unit-norm rows of H.
  for (Index r = 0; r < H.rows(); ++r) {
    const double norm = H.row(r).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      H.row(r) /= norm;
      Z.col(r) *= norm;
    }
  }
  result.residual = (X - Z * H).norm();
  result.iters = static_cast<int>(result.history.size());
  result.Z = std::move(Z);
  result.H = std::move(H);
  result.rank_deficient = info.rank_deficient;
  return result;
}

}  // namespace mvdmf
