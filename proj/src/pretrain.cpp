#include "mvdmf/pretrain.hpp"

#include "mvdmf/consensus.hpp"
#include "mvdmf/error.hpp"
#include "mvdmf/linalg.hpp"
#include "mvdmf/seminmf.hpp"

namespace mvdmf {

FactorStack pretrain_view(const Matrix& X, const LayerSpec& layers, int iters,
                          std::uint64_t seed, int* rank_deficient) {
  if (layers.sizes.empty()) throw InvalidArgument("layer spec is empty");
  FactorStack stack;
  const Matrix* input = &X;
  for (std::size_t i = 0; i < layers.depth(); ++i) {
    SemiNmfResult layer;
    try {
      layer = fit_seminmf(*input, layers.sizes[i], iters, seed + i);
    } catch (const Error& e) {
      throw Error("pretraining layer " + std::to_string(i + 1) + ": " + e.what());
    }
    if (rank_deficient) *rank_deficient += layer.rank_deficient;
    stack.mappings.push_back(std::move(layer.Z));
    stack.representations.push_back(std::move(layer.H));
    input = &stack.representations.back();
  }
  return stack;
}

std::uint64_t view_seed(std::uint64_t run_seed, std::size_t view) {
  return derive_seed(run_seed, view);
}

ModelState initialize_state(const MultiViewDataset& ds, const FitConfig& cfg) {
  cfg.validate();
  validate_dataset(ds);
  validate_layers(cfg.layers, ds);
  ModelState state;
  state.beta = cfg.beta;
  const std::size_t V = ds.num_views();
  state.stacks.reserve(V);
  for (std::size_t v = 0; v < V; ++v) {
    try {
      state.stacks.push_back(
          pretrain_view(ds.views[v], cfg.layers, cfg.pretrain_iters, view_seed(cfg.rng_seed, v)));
    } catch (const Error& e) {
      throw Error("view " + std::to_string(v) + ": " + e.what());
    }
  }
  state.alpha = Vector::Constant(static_cast<Index>(V), 1.0 / static_cast<double>(V));
  const auto tops = state.tops();
  state.S = update_consensus_graph(compute_q(tops, state.alpha));
  return state;
}

}  // namespace mvdmf
