#include "mvdmf/finetune.hpp"

#include "mvdmf/error.hpp"

#include <algorithm>

namespace mvdmf {

ChainCache chain_cache(const FactorStack& stack, std::size_t layer) {
  const std::size_t m = stack.depth();
  if (layer >= m) throw InvalidArgument("layer index out of range");
  ChainCache cache;
  cache.phi_is_identity = layer == 0;
  if (!cache.phi_is_identity) {
    cache.phi = stack.mappings[0];
    for (std::size_t j = 1; j < layer; ++j) cache.phi = cache.phi * stack.mappings[j];
    cache.Phi = cache.phi * stack.mappings[layer];
  } else {
    cache.Phi = stack.mappings[0];
  }
  cache.Hhat = stack.top();
  for (std::size_t j = m - 1; j > layer; --j) cache.Hhat = stack.mappings[j] * cache.Hhat;
  return cache;
}

Matrix update_mapping(const Matrix& X, const FactorStack& stack, std::size_t layer,
                      SolveInfo* info) {
  const ChainCache cache = chain_cache(stack, layer);
  // Hhat = Z_{i+1} ... Z_m H_m has rank at most l_m, and so does every
  // minimum-norm Z_i solved against it: for inner layers both Gram matrices
  // are singular by construction. Only a drop below that bound is reported.
  const Index top_width = stack.top().rows();
  const Index expected = std::min(cache.Hhat.rows(), top_width);
  Index rank = 0;
  const Matrix right =
      cache.Hhat.transpose() * spd_pseudo_inverse(cache.Hhat * cache.Hhat.transpose(), &rank);
  if (rank < expected && info) ++info->rank_deficient;
  const Matrix XHhat = X * right;
  if (cache.phi_is_identity) return XHhat;
  const Matrix left = spd_pseudo_inverse(cache.phi.transpose() * cache.phi, &rank);
  if (rank < std::min(cache.phi.cols(), top_width) && info) ++info->rank_deficient;
  return left * (cache.phi.transpose() * XHhat);
}

Matrix update_hidden(const Matrix& X, const FactorStack& stack, std::size_t layer) {
  const ChainCache cache = chain_cache(stack, layer);
  return kkt_representation_step(stack.representations[layer], cache.Phi.transpose() * X,
                                 cache.Phi.transpose() * cache.Phi);
}

namespace {

struct TopTerms {
  Matrix PhitX;
  Matrix PhitPhiH;
  Matrix PhitPhiPosH;  // [Phi^T Phi]^+ H
  Matrix PhitPhiNegH;  // [Phi^T Phi]^- H
  Matrix HS;
  Matrix HSt;
  Matrix HG2;    // 2 H G
  Matrix HHtH2;  // 2 alpha_v H H^T H
};

TopTerms top_terms(const Matrix& X, const FactorStack& stack, std::size_t view,
                   const TopCoupling& c) {
  if (c.tops.size() != static_cast<std::size_t>(c.alpha.size()))
    throw DimensionMismatch("update_top: alpha length does not match view count");
  const Matrix& H = stack.top();
  const ChainCache cache = chain_cache(stack, stack.depth() - 1);
  TopTerms t;
  t.PhitX = cache.Phi.transpose() * X;
  const Matrix PhitPhi = cache.Phi.transpose() * cache.Phi;
  t.PhitPhiPosH = positive_part(PhitPhi) * H;
  t.PhitPhiNegH = negative_part(PhitPhi) * H;
  t.PhitPhiH = t.PhitPhiPosH - t.PhitPhiNegH;
  t.HS = H * c.S;
  t.HSt = H * c.S.transpose();
  // H G = sum_o alpha_o (H H_o^T) H_o, without forming any n x n Gram.
  t.HG2 = Matrix::Zero(H.rows(), H.cols());
  for (std::size_t o = 0; o < c.tops.size(); ++o) {
    if (o == view) continue;
    const double a = c.alpha(static_cast<Index>(o));
    if (a == 0.0) continue;
    t.HG2.noalias() += (2.0 * a) * ((H * c.tops[o].transpose()) * c.tops[o]);
  }
  t.HHtH2 = (2.0 * c.alpha(static_cast<Index>(view))) * ((H * H.transpose()) * H);
  return t;
}

}  // namespace

Matrix update_top(const Matrix& X, const FactorStack& stack, std::size_t view,
                  const TopCoupling& coupling) {
  const TopTerms t = top_terms(X, stack, view, coupling);
  const double weight = coupling.alpha(static_cast<Index>(view)) * coupling.beta;
  const Matrix numer = positive_part(t.PhitX) + t.PhitPhiNegH +
                       weight * (positive_part(t.HS) + positive_part(t.HSt) +
                                 negative_part(t.HG2) + negative_part(t.HHtH2));
  const Matrix denom = negative_part(t.PhitX) + t.PhitPhiPosH +
                       weight * (negative_part(t.HS) + negative_part(t.HSt) +
                                 positive_part(t.HG2) + positive_part(t.HHtH2));
  return multiplicative_step(stack.top(), numer, denom);
}

Matrix top_gradient(const Matrix& X, const FactorStack& stack, std::size_t view,
                    const TopCoupling& coupling) {
  const TopTerms t = top_terms(X, stack, view, coupling);
  const double weight = coupling.alpha(static_cast<Index>(view)) * coupling.beta;
  return -t.PhitX + t.PhitPhiH - weight * (t.HS + t.HSt - t.HG2 - t.HHtH2);
}

void sweep_view(const Matrix& X, FactorStack& stack, std::size_t view,
                const TopCoupling& coupling, SolveInfo* info) {
  for (std::size_t i = 0; i < stack.depth(); ++i) {
    stack.mappings[i] = update_mapping(X, stack, i, info);
    stack.representations[i] = update_hidden(X, stack, i);
  }
  stack.top() = update_top(X, stack, view, coupling);
}

}  // namespace mvdmf
