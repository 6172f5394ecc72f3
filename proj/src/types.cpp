#include "mvdmf/types.hpp"

#include "mvdmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mvdmf {

std::vector<Index> MultiViewDataset::view_dims() const {
  std::vector<Index> dims;
  dims.reserve(views.size());
  for (const auto& view : views) dims.push_back(view.rows());
  return dims;
}

int MultiViewDataset::num_classes() const {
  if (!labels) return 0;
  return static_cast<int>(std::set<int>(labels->begin(), labels->end()).size());
}

std::vector<Matrix> ModelState::tops() const {
  std::vector<Matrix> out;
  out.reserve(stacks.size());
  for (const auto& stack : stacks) out.push_back(stack.top());
  return out;
}

void FitConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidArgument("beta must be a positive finite number");
  if (layers.sizes.empty()) throw InvalidArgument("layer spec is empty");
  for (Index l : layers.sizes)
    if (l < 1) throw InvalidArgument("layer widths must be >= 1");
  if (max_outer_iters < 0) throw InvalidArgument("max_outer_iters must be >= 0");
  if (pretrain_iters < 1) throw InvalidArgument("pretrain_iters must be >= 1");
  if (!(tol_rel_objective >= 0.0))
    throw InvalidArgument("tol_rel_objective must be >= 0");
  if (patience < 1) throw InvalidArgument("patience must be >= 1");
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
}

const MultiViewDataset& validate_dataset(const MultiViewDataset& ds) {
  if (ds.views.empty()) throw DimensionMismatch("dataset has no views");
  const Index n = ds.views.front().cols();
  if (n < 2) throw DimensionMismatch("dataset needs at least 2 samples");
  for (std::size_t v = 0; v < ds.views.size(); ++v) {
    const Matrix& X = ds.views[v];
    if (X.cols() != n) {
      std::ostringstream msg;
      msg << "view " << v << " has " << X.cols() << " samples, expected " << n;
      throw DimensionMismatch(msg.str());
    }
    if (X.rows() < 1) throw DimensionMismatch("view " + std::to_string(v) + " has no features");
    for (Index c = 0; c < X.cols(); ++c)
      for (Index r = 0; r < X.rows(); ++r)
        if (!std::isfinite(X(r, c)))
          throw NonFiniteEntry(v, static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  if (ds.labels) {
    const auto& labels = *ds.labels;
    if (static_cast<Index>(labels.size()) != n)
      throw LabelRangeError("label count " + std::to_string(labels.size()) +
                            " does not match sample count " + std::to_string(n));
    const int classes = ds.num_classes();
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (labels[j] < 0 || labels[j] >= classes)
        throw LabelRangeError("label " + std::to_string(labels[j]) + " at sample " +
                              std::to_string(j) + " outside [0, " +
                              std::to_string(classes) + ")");
  }
  return ds;
}

void validate_layers(const LayerSpec& layers, const MultiViewDataset& ds,
                     std::optional<int> k) {
  if (layers.sizes.empty()) throw InvalidArgument("layer spec is empty");
  const auto dims = ds.view_dims();
  const Index min_dim = dims.empty() ? 0 : *std::min_element(dims.begin(), dims.end());
  Index previous = min_dim;
  for (std::size_t i = 0; i < layers.sizes.size(); ++i) {
    const Index l = layers.sizes[i];
    if (l < 1) throw InvalidArgument("layer widths must be >= 1");
    if (l > previous) {
      std::ostringstream msg;
      msg << "layer " << i + 1 << " width " << l << " exceeds "
          << (i == 0 ? "smallest view dimension " : "previous layer width ") << previous;
      throw InvalidArgument(msg.str());
    }
    previous = l;
  }
  if (layers.top() > ds.num_samples())
    throw InvalidArgument("last layer width exceeds sample count");
  if (k && layers.top() != *k)
    throw InvalidArgument("last layer width " + std::to_string(layers.top()) +
                          " must equal the cluster count " + std::to_string(*k));
}

std::vector<std::string> check_state_invariants(const ModelState& state,
                                                InvariantTolerances tol) {
  std::vector<std::string> problems;
  const Matrix& S = state.S;
  if (S.rows() != S.cols()) problems.push_back("S is not square");
  if ((S.array() < 0.0).any()) problems.push_back("S has negative entries");
  if (!S.allFinite()) problems.push_back("S has non-finite entries");
  if (S.rows() == S.cols()) {
    if (S.diagonal().cwiseAbs().maxCoeff() != 0.0) problems.push_back("diag(S) is not zero");
    const double worst = (S.rowwise().sum().array() - 1.0).abs().maxCoeff();
    if (worst > tol.row_sum) problems.push_back("S row sums deviate from 1 by " + std::to_string(worst));
  }
  const Vector& alpha = state.alpha;
  if (alpha.size() != static_cast<Index>(state.stacks.size()))
    problems.push_back("alpha length does not match view count");
  if ((alpha.array() < 0.0).any()) problems.push_back("alpha has negative entries");
  if (std::abs(alpha.sum() - 1.0) > tol.alpha_sum) problems.push_back("alpha does not sum to 1");
  for (std::size_t v = 0; v < state.stacks.size(); ++v) {
    const FactorStack& stack = state.stacks[v];
    if (stack.mappings.size() != stack.representations.size()) {
      problems.push_back("view " + std::to_string(v) + " stack has mismatched depth");
      continue;
    }
    for (std::size_t i = 0; i < stack.depth(); ++i) {
      const Matrix& H = stack.representations[i];
      if ((H.array() < 0.0).any() || !H.allFinite())
        problems.push_back("view " + std::to_string(v) + " H_" + std::to_string(i + 1) +
                           " is not nonnegative and finite");
      if (stack.mappings[i].cols() != H.rows())
        problems.push_back("view " + std::to_string(v) + " layer " + std::to_string(i + 1) +
                           " chain dimensions do not compose");
      if (i > 0 && stack.mappings[i].rows() != stack.representations[i - 1].rows())
        problems.push_back("view " + std::to_string(v) + " Z_" + std::to_string(i + 1) +
                           " rows do not match H_" + std::to_string(i));
    }
  }
  return problems;
}

}  // namespace mvdmf
