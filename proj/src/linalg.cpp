#include "mvdmf/linalg.hpp"

#include <random>

namespace mvdmf {

Matrix spd_pseudo_inverse(const Matrix& gram, Index* rank) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& values = eig.eigenvalues();
  const double lambda_max = values.size() > 0 ? values.maxCoeff() : 0.0;
  const double cutoff = kEigenCutoff * lambda_max;
  Index kept = 0;
  Vector inverse(values.size());
  for (Index i = 0; i < values.size(); ++i) {
    if (values(i) > cutoff && values(i) > 0.0) {
      inverse(i) = 1.0 / values(i);
      ++kept;
    } else {
      inverse(i) = 0.0;
    }
  }
  if (rank) *rank = kept;
  const Matrix& U = eig.eigenvectors();
  return U * inverse.asDiagonal() * U.transpose();
}

Matrix multiplicative_step(const Matrix& H, const Matrix& numer, const Matrix& denom) {
  return H.cwiseProduct((numer.array() / denom.array().max(kUpdateEpsilon)).sqrt().matrix());
}

Matrix kkt_representation_step(const Matrix& H, const Matrix& AtX, const Matrix& AtA) {
  return multiplicative_step(H, positive_part(AtX) + negative_part(AtA) * H,
                             negative_part(AtX) + positive_part(AtA) * H);
}

Matrix random_positive(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = 1.0 - unit(rng);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mvdmf
