#pragma once

#include "mvdmf/linalg.hpp"
#include "mvdmf/types.hpp"

#include <span>

namespace mvdmf {

// Chain products around layer i (0-based) of one view:
//   phi  = Z_1 ... Z_{i-1}      (identity when i is the first layer)
//   Phi  = Z_1 ... Z_i
//   Hhat = Z_{i+1} ... Z_m H_m  (H_m itself for the last layer)
struct ChainCache {
  bool phi_is_identity = true;
  Matrix phi;
  Matrix Phi;
  Matrix Hhat;
};

ChainCache chain_cache(const FactorStack& stack, std::size_t layer);

// Closed-form Z_i = phi^+ X Hhat^+ minimizing ||X - phi Z_i Hhat||_F.
Matrix update_mapping(const Matrix& X, const FactorStack& stack, std::size_t layer,
                      SolveInfo* info = nullptr);

// KKT multiplicative update of H_i against ||X - Phi H_i||_F.
Matrix update_hidden(const Matrix& X, const FactorStack& stack, std::size_t layer);

// Graph-coupled inputs of the top-layer update for one view.
struct TopCoupling {
  std::span<const Matrix> tops;  // H_m of every view; entry `view` is ignored
  const Matrix& S;
  const Vector& alpha;
  double beta;
};

// Multiplicative update of H_m for view `view` against
//   ||X - Phi H_m||_F^2 + beta ||S - alpha_v H_m^T H_m - G||_F^2,
// G = sum_{o != view} alpha_o H_m^(o)T H_m^(o).
Matrix update_top(const Matrix& X, const FactorStack& stack, std::size_t view,
                  const TopCoupling& coupling);

// Half-gradient of the top-layer subproblem at the current H_m. Fixed points
// of update_top satisfy grad .* H_m^2 = 0.
Matrix top_gradient(const Matrix& X, const FactorStack& stack, std::size_t view,
                    const TopCoupling& coupling);

// One fine-tuning pass over a single view: (Z_i, H_i) for every layer in
// order, then the coupled H_m update.
void sweep_view(const Matrix& X, FactorStack& stack, std::size_t view,
                const TopCoupling& coupling, SolveInfo* info = nullptr);

}  // namespace mvdmf
