#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mvdmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// V feature matrices over the same n samples. Each view is d_v x n:
// features are rows, samples are columns.
struct MultiViewDataset {
  std::vector<Matrix> views;
  std::optional<std::vector<int>> labels;
  std::string name;

  std::size_t num_views() const { return views.size(); }
  Index num_samples() const { return views.empty() ? 0 : views.front().cols(); }
  std::vector<Index> view_dims() const;
  // Number of distinct classes in `labels`, 0 when unlabeled.
  int num_classes() const;
};

// Layer widths shared by every view. The last width is the cluster count.
struct LayerSpec {
  std::vector<Index> sizes;

  std::size_t depth() const { return sizes.size(); }
  Index top() const { return sizes.back(); }

  bool operator==(const LayerSpec&) const = default;
};

// Per-view deep factorization: X ~ Z_1 Z_2 ... Z_m H_m with H_{i-1} ~ Z_i H_i.
struct FactorStack {
  std::vector<Matrix> mappings;         // Z_1 (d x l_1), Z_i (l_{i-1} x l_i)
  std::vector<Matrix> representations;  // H_i (l_i x n), elementwise >= 0

  std::size_t depth() const { return mappings.size(); }
  const Matrix& top() const { return representations.back(); }
  Matrix& top() { return representations.back(); }
};

struct ModelState {
  std::vector<FactorStack> stacks;
  Matrix S;      // n x n consensus graph, row-stochastic, zero diagonal
  Vector alpha;  // view weights on the probability simplex
  double beta = 1.0;

  std::vector<Matrix> tops() const;
};

// How the cross-view coupling G sees other views during one sweep.
enum class ViewSchedule {
  kSequential,  // freshest H_m of views already updated in this sweep
  kSnapshot,    // H_m of every view as of the start of the sweep
};

struct FitConfig {
  double beta = 1.0;
  LayerSpec layers;
  int max_outer_iters = 150;
  int pretrain_iters = 100;
  double tol_rel_objective = 1e-6;
  int patience = 5;  // consecutive below-tolerance iterations to stop
  int restarts = 1;
  std::uint64_t rng_seed = 0;
  ViewSchedule schedule = ViewSchedule::kSequential;

  void validate() const;

  bool operator==(const FitConfig&) const = default;
};

// Throws DimensionMismatch, NonFiniteEntry or LabelRangeError; returns the
// input unchanged otherwise.
const MultiViewDataset& validate_dataset(const MultiViewDataset& ds);

// Checks widths against a dataset: every l_i >= 1, l_1 <= min_v d_v,
// l_i <= l_{i-1}, l_m <= n and, when k is given, l_m == k.
void validate_layers(const LayerSpec& layers, const MultiViewDataset& ds,
                     std::optional<int> k = std::nullopt);

struct InvariantTolerances {
  double row_sum = 1e-9;
  double alpha_sum = 1e-12;
};

// Empty when every ModelState invariant holds; otherwise one message per
// violated invariant.
std::vector<std::string> check_state_invariants(const ModelState& state,
                                                InvariantTolerances tol = {});

}  // namespace mvdmf
