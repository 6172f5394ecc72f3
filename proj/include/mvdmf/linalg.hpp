#pragma once

#include "mvdmf/types.hpp"

#include <cstdint>

namespace mvdmf {

// Denominator floor used by every multiplicative update.
inline constexpr double kUpdateEpsilon = 1e-12;

// Eigenvalues of a Gram matrix at or below this fraction of the largest one
// are treated as zero by the pseudo-inverse.
inline constexpr double kEigenCutoff = 1e-10;

// Diagnostics filled in by solves that may hit a singular Gram matrix.
struct SolveInfo {
  int rank_deficient = 0;  // solves whose Gram rank fell below the expected rank
};

// Moore-Penrose pseudo-inverse of a symmetric positive semi-definite matrix
// through its eigendecomposition. Eigenvalues <= kEigenCutoff * lambda_max are
// dropped; *rank receives the number kept.
Matrix spd_pseudo_inverse(const Matrix& gram, Index* rank = nullptr);

// Elementwise positive part max(A, 0) and negative part max(-A, 0).
inline Matrix positive_part(const Matrix& A) { return A.cwiseMax(0.0); }
inline Matrix negative_part(const Matrix& A) { return (-A).cwiseMax(0.0); }

// H <- H .* sqrt(numer ./ max(denom, eps)). Zero entries of H stay zero.
Matrix multiplicative_step(const Matrix& H, const Matrix& numer, const Matrix& denom);

// Nonnegative least-squares style KKT update for min ||X - A H|| over H >= 0,
// given the precomputed products A^T X and A^T A.
Matrix kkt_representation_step(const Matrix& H, const Matrix& AtX, const Matrix& AtA);

// Uniform (0, 1] draws from a seeded generator.
Matrix random_positive(Index rows, Index cols, std::uint64_t seed);

// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace mvdmf
