#pragma once

#include "mvdmf/types.hpp"

#include <cstdint>

namespace mvdmf {

// Layer-by-layer semi-NMF: X ~ Z_1 H_1, then H_{i-1} ~ Z_i H_i. Layer i is
// seeded with `seed + i`, so a depth-1 spec reproduces fit_seminmf(X, l, iters, seed).
FactorStack pretrain_view(const Matrix& X, const LayerSpec& layers, int iters,
                          std::uint64_t seed, int* rank_deficient = nullptr);

// Seed used for view v of a run seeded with `run_seed`.
std::uint64_t view_seed(std::uint64_t run_seed, std::size_t view);

// Pretrains every view, sets alpha = 1/V and S = projection of
// sum_v alpha_v H_m^T H_m onto the consensus-graph feasible set.
ModelState initialize_state(const MultiViewDataset& ds, const FitConfig& cfg);

}  // namespace mvdmf
