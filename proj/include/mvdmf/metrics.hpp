#pragma once

#include "mvdmf/types.hpp"

#include <vector>

namespace mvdmf {

// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres with
// potentials, O(k^3)). Returns assignment[row] = column.
std::vector<int> hungarian(const Matrix& cost);

double assignment_cost(const Matrix& cost, const std::vector<int>& assignment);

// counts(p, t) = number of samples with predicted id p and true id t. Ids are
// compacted to 0..K-1 in increasing order first.
Matrix contingency(const std::vector<int>& pred, const std::vector<int>& truth);

// Fraction of samples correctly labeled under the best one-to-one mapping of
// clusters to classes (contingency padded to square).
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

enum class NmiNormalization { kGeometric, kArithmetic, kMax };

// I(pred; truth) / norm(H(pred), H(truth)), natural log. Returns 0 when the
// normalizer is 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth,
           NmiNormalization norm = NmiNormalization::kGeometric);

// (1/n) sum over clusters of the largest class overlap.
double purity(const std::vector<int>& pred, const std::vector<int>& truth);

struct ClusteringScores {
  double acc = 0.0;
  double nmi = 0.0;
  double pur = 0.0;

  bool operator==(const ClusteringScores&) const = default;
};

ClusteringScores score_clustering(const std::vector<int>& pred, const std::vector<int>& truth,
                                  NmiNormalization norm = NmiNormalization::kGeometric);

}  // namespace mvdmf
