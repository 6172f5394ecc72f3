#include "mvdmf/metrics.hpp"

#include "mvdmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mvdmf {

std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionMismatch("hungarian: cost matrix must be square");
  if (!cost.allFinite()) throw InvalidArgument("hungarian: cost matrix must be finite");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; match[j] is the row assigned to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_cost(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col = 0;
    std::fill(way_cost.begin(), way_cost.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col] = 1;
      const int i = match[col];
      double delta = inf;
      int next = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i - 1, j - 1) - u[i] - v[j];
        if (reduced < way_cost[j]) {
          way_cost[j] = reduced;
          way[j] = col;
        }
        if (way_cost[j] < delta) {
          delta = way_cost[j];
          next = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          way_cost[j] -= delta;
        }
      }
      col = next;
    } while (match[col] != 0);
    do {
      const int prev = way[col];
      match[col] = match[prev];
      col = prev;
    } while (col != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  return assignment;
}

double assignment_cost(const Matrix& cost, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    total += cost(static_cast<Index>(r), assignment[r]);
  return total;
}

namespace {

std::vector<int> compact(const std::vector<int>& labels, int& count) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = next;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids[l]);
  return out;
}

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw LengthMismatch("prediction has " + std::to_string(pred.size()) + " labels, truth has " +
                         std::to_string(truth.size()));
  if (pred.empty()) throw LengthMismatch("empty label vectors");
}

double entropy(const Vector& counts, double n) {
  double h = 0.0;
  for (Index i = 0; i < counts.size(); ++i)
    if (counts(i) > 0.0) {
      const double p = counts(i) / n;
      h -= p * std::log(p);
    }
  return h;
}

}  // namespace

Matrix contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth);
  int kp = 0, kt = 0;
  const auto p = compact(pred, kp);
  const auto t = compact(truth, kt);
  Matrix counts = Matrix::Zero(kp, kt);
  for (std::size_t i = 0; i < p.size(); ++i) counts(p[i], t[i]) += 1.0;
  return counts;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Matrix counts = contingency(pred, truth);
  const Index k = std::max(counts.rows(), counts.cols());
  Matrix cost = Matrix::Zero(k, k);
  cost.topLeftCorner(counts.rows(), counts.cols()) = -counts;
  const auto assignment = hungarian(cost);
  return -assignment_cost(cost, assignment) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, NmiNormalization norm) {
  const Matrix counts = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  const Vector row = counts.rowwise().sum();
  const Vector col = counts.colwise().sum().transpose();
  double mutual = 0.0;
  for (Index a = 0; a < counts.rows(); ++a)
    for (Index b = 0; b < counts.cols(); ++b) {
      const double c = counts(a, b);
      if (c > 0.0) mutual += (c / n) * std::log(c * n / (row(a) * col(b)));
    }
  const double hp = entropy(row, n);
  const double ht = entropy(col, n);
  double denom = 0.0;
  switch (norm) {
    case NmiNormalization::kGeometric: denom = std::sqrt(hp * ht); break;
    case NmiNormalization::kArithmetic: denom = 0.5 * (hp + ht); break;
    case NmiNormalization::kMax: denom = std::max(hp, ht); break;
  }
  if (denom <= 0.0) return 0.0;
  return std::clamp(mutual / denom, 0.0, 1.0);
}

double purity(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Matrix counts = contingency(pred, truth);
  return counts.rowwise().maxCoeff().sum() / static_cast<double>(pred.size());
}

ClusteringScores score_clustering(const std::vector<int>& pred, const std::vector<int>& truth,
                                  NmiNormalization norm) {
  return {accuracy(pred, truth), nmi(pred, truth, norm), purity(pred, truth)};
}

}  // namespace mvdmf
