#include "mvdmf/spectral.hpp"

#include "mvdmf/error.hpp"
#include "mvdmf/linalg.hpp"
#include "mvdmf/metrics.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace mvdmf {

namespace {
constexpr double kDegreeFloor = 1e-12;
}

Matrix normalized_laplacian(const Matrix& S, int* isolated) {
  if (S.rows() != S.cols()) throw DimensionMismatch("graph must be square");
  const Matrix W = 0.5 * (S + S.transpose());
  Vector degree = W.rowwise().sum();
  int floored = 0;
  for (Index i = 0; i < degree.size(); ++i)
    if (degree(i) < kDegreeFloor) {
      degree(i) = kDegreeFloor;
      ++floored;
    }
  if (isolated) *isolated = floored;
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Matrix L = -(inv_sqrt.asDiagonal() * W * inv_sqrt.asDiagonal());
  L.diagonal().array() += 1.0;
  return 0.5 * (L + L.transpose());
}

SpectralEmbedding spectral_embed(const Matrix& S, int k) {
  if (k < 1 || k > S.rows()) throw InvalidArgument("spectral_embed: k outside [1, n]");
  SpectralEmbedding out;
  const Matrix L = normalized_laplacian(S, &out.isolated_nodes);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(L);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition of the Laplacian failed");
  out.eigenvalues = eig.eigenvalues().head(k);
  out.eigenvectors = eig.eigenvectors().leftCols(k);
  out.embedding = out.eigenvectors;
  for (Index i = 0; i < out.embedding.rows(); ++i) {
    const double norm = out.embedding.row(i).norm();
    if (norm > 0.0) out.embedding.row(i) /= norm;
  }
  return out;
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  Matrix centroids;
  double wcss = std::numeric_limits<double>::infinity();
  int reseeded = 0;
};

Matrix plus_plus_seeds(const Matrix& points, int k, std::mt19937_64& rng) {
  const Index n = points.rows();
  Matrix centroids(k, points.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centroids.row(0) = points.row(pick(rng));
  Vector nearest = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Index chosen = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= nearest(i);
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centroids.row(c) = points.row(chosen);
    nearest = nearest.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

LloydRun lloyd(const Matrix& points, Matrix centroids, int max_iters) {
  const Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  Vector distance(n);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      distance(i) = best_d;
      if (run.labels[static_cast<std::size_t>(i)] != best) {
        run.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])];
    }
    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move its centroid to the point farthest from its own.
      Index far = 0;
      distance.maxCoeff(&far);
      centroids.row(c) = points.row(far);
      distance(far) = 0.0;
      run.labels[static_cast<std::size_t>(far)] = c;
      ++run.reseeded;
      reseeded = true;
    }
    if (!changed && !reseeded) break;
  }
  run.wcss = 0.0;
  for (Index i = 0; i < n; ++i)
    run.wcss += (points.row(i) - centroids.row(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed, int max_iters) {
  if (k < 1 || k > points.rows()) throw InvalidArgument("kmeans: k outside [1, n]");
  if (restarts < 1) throw InvalidArgument("kmeans: restarts must be >= 1");
  KMeansResult out;
  LloydRun best;
  int reseeded = 0;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    LloydRun run = lloyd(points, plus_plus_seeds(points, k, rng), max_iters);
    reseeded += run.reseeded;
    if (run.wcss < best.wcss) best = std::move(run);
  }
  out.partition = {std::move(best.labels), k};
  out.centroids = std::move(best.centroids);
  out.wcss = best.wcss;
  out.reseeded = reseeded;
  return out;
}

Partition cluster_graph(const Matrix& S, int k, int restarts, std::uint64_t seed) {
  return kmeans(spectral_embed(S, k).embedding, k, restarts, seed).partition;
}

BaselineResult best_view_kmeans(const MultiViewDataset& ds, int k, int restarts,
                                std::uint64_t seed, const std::vector<int>* truth) {
  if (ds.views.empty()) throw InvalidArgument("dataset has no views");
  BaselineResult best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < ds.num_views(); ++v) {
    const Matrix points = ds.views[v].transpose();
    KMeansResult run = kmeans(points, k, restarts, derive_seed(seed, v));
    double score;
    if (truth) {
      score = accuracy(run.partition.labels, *truth);
    } else {
      const double scatter = (points.rowwise() - points.colwise().mean()).squaredNorm();
      score = scatter > 0.0 ? -run.wcss / scatter : 0.0;
    }
    if (score > best_score) {
      best_score = score;
      best.partition = std::move(run.partition);
      best.view = v;
    }
  }
  return best;
}

Partition concatenated_kmeans(const MultiViewDataset& ds, int k, int restarts, std::uint64_t seed) {
  Index rows = 0;
  for (const auto& view : ds.views) rows += view.rows();
  Matrix stacked(rows, ds.num_samples());
  Index offset = 0;
  for (const auto& view : ds.views) {
    stacked.middleRows(offset, view.rows()) = view;
    offset += view.rows();
  }
  return kmeans(stacked.transpose(), k, restarts, seed).partition;
}

}  // namespace mvdmf
