#pragma once

#include "mvdmf/types.hpp"

#include <cstdint>
#include <vector>

namespace mvdmf {

struct Partition {
  std::vector<int> labels;  // ids in [0, k)
  int k = 0;
};

// I - D^{-1/2} W D^{-1/2} with W = (S + S^T) / 2 and D the row sums of W.
// Degrees below 1e-12 are floored; `isolated` counts such nodes.
Matrix normalized_laplacian(const Matrix& S, int* isolated = nullptr);

struct SpectralEmbedding {
  Matrix embedding;     // n x k, rows scaled to unit length
  Matrix eigenvectors;  // n x k orthonormal, before row scaling
  Vector eigenvalues;   // k smallest eigenvalues of L_sym, ascending
  int isolated_nodes = 0;
};

// Normalized spectral embedding: the k eigenvectors of L_sym with the
// smallest eigenvalues, rows normalized (zero rows stay zero).
SpectralEmbedding spectral_embed(const Matrix& S, int k);

struct KMeansResult {
  Partition partition;
  Matrix centroids;  // k x dim
  double wcss = 0.0;
  int reseeded = 0;  // empty clusters repaired across all restarts
};

// Lloyd iterations from k-means++ seeds; keeps the restart with the smallest
// within-cluster sum of squares. `points` holds one sample per row.
KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed,
                    int max_iters = 300);

// spectral_embed followed by kmeans on the embedding rows.
Partition cluster_graph(const Matrix& S, int k, int restarts, std::uint64_t seed);

// Baselines over raw views (samples are columns of each view).
// BKM: k-means per view, the best view by ACC when `truth` is given,
// otherwise by WCSS relative to total scatter. AKM: k-means on the
// concatenated views.
struct BaselineResult {
  Partition partition;
  std::size_t view = 0;  // selected view for BKM
};
BaselineResult best_view_kmeans(const MultiViewDataset& ds, int k, int restarts,
                                std::uint64_t seed, const std::vector<int>* truth = nullptr);
Partition concatenated_kmeans(const MultiViewDataset& ds, int k, int restarts, std::uint64_t seed);

}  // namespace mvdmf
