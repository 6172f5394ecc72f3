#pragma once

#include "mvdmf/types.hpp"

#include <span>
#include <vector>

namespace mvdmf {

// H^T H: inner-product similarity between the samples (columns) of H.
Matrix gram_similarity(const Matrix& H);

// Q = sum_v alpha_v H_v^T H_v.
Matrix compute_q(std::span<const Matrix> tops, const Vector& alpha);

// Euclidean projection of `row` onto {s >= 0, sum(s) = 1, s[pinned] = 0}.
// Sort-based; exact up to rounding.
Vector project_row_to_simplex(const Vector& row, Index pinned);

// Row-wise projection of Q onto the consensus-graph feasible set.
Matrix update_consensus_graph(const Matrix& Q);

// Quadratic program min 0.5 a^T A a - f^T a over the probability simplex,
// equivalent to min ||S - sum_v a_v H_v^T H_v||_F^2.
struct WeightQp {
  Matrix A;  // A_pq = tr(H_p^T H_p H_q^T H_q) = ||H_p H_q^T||_F^2
  Vector f;  // f_v = tr(S^T H_v^T H_v)

  double objective(const Vector& alpha) const {
    return 0.5 * alpha.dot(A * alpha) - f.dot(alpha);
  }
};

WeightQp build_weight_qp(const Matrix& S, std::span<const Matrix> tops);

struct QpSolution {
  Vector alpha;
  int iterations = 0;
  double kkt_residual = 0.0;  // absolute, see kkt_residual()
};

// Largest violation of the simplex KKT conditions at alpha: gradient entries
// on the support must share a common value mu, off-support entries must be
// >= mu. `support_tol` decides which coordinates count as positive.
double kkt_residual(const WeightQp& qp, const Vector& alpha, double support_tol = 1e-12);

// Projected gradient with Barzilai-Borwein steps and exact simplex projection,
// followed by an exact solve on the identified support. Starts at the
// uniform weight vector. Throws SolverStall when the scaled KKT residual does
// not fall below `tol` within `max_iters` iterations.
QpSolution solve_weight_qp(const WeightQp& qp, double tol = 1e-10, int max_iters = 100000);

// Projection of an arbitrary vector onto the probability simplex.
Vector project_to_simplex(const Vector& x);

// Full alpha update from the current S and top representations.
Vector update_view_weights(const Matrix& S, std::span<const Matrix> tops);

}  // namespace mvdmf
