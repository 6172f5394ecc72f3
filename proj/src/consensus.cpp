#include "mvdmf/consensus.hpp"

#include "mvdmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace mvdmf {

Matrix gram_similarity(const Matrix& H) {
  Matrix G(H.cols(), H.cols());
  G.setZero();
  G.selfadjointView<Eigen::Lower>().rankUpdate(H.transpose());
  return G.selfadjointView<Eigen::Lower>();
}

Matrix compute_q(std::span<const Matrix> tops, const Vector& alpha) {
  if (tops.empty()) throw InvalidArgument("compute_q: no views");
  if (alpha.size() != static_cast<Index>(tops.size()))
    throw DimensionMismatch("compute_q: alpha length does not match view count");
  const Index n = tops.front().cols();
  Matrix Q = Matrix::Zero(n, n);
  for (std::size_t v = 0; v < tops.size(); ++v) {
    if (alpha(static_cast<Index>(v)) == 0.0) continue;
    Q.selfadjointView<Eigen::Lower>().rankUpdate(tops[v].transpose(),
                                                 alpha(static_cast<Index>(v)));
  }
  return Q.selfadjointView<Eigen::Lower>();
}

namespace {

// Projects x (length m) onto the probability simplex in place.
void simplex_project_inplace(double* x, Index m, std::vector<double>& scratch) {
  scratch.assign(x, x + m);
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < m; ++j) {
    cumulative += scratch[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (scratch[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  for (Index j = 0; j < m; ++j) x[j] = std::max(x[j] - theta, 0.0);
  // Renormalize the support to absorb rounding in the threshold.
  double total = 0.0;
  for (Index j = 0; j < m; ++j) total += x[j];
  if (total > 0.0)
    for (Index j = 0; j < m; ++j) x[j] /= total;
}

}  // namespace

Vector project_to_simplex(const Vector& x) {
  Vector out = x;
  std::vector<double> scratch;
  simplex_project_inplace(out.data(), out.size(), scratch);
  return out;
}

Vector project_row_to_simplex(const Vector& row, Index pinned) {
  const Index n = row.size();
  if (n < 2) throw InvalidArgument("projection needs at least two coordinates");
  if (pinned < 0 || pinned >= n) throw InvalidArgument("pinned coordinate out of range");
  Vector free(n - 1);
  free.head(pinned) = row.head(pinned);
  free.tail(n - 1 - pinned) = row.tail(n - 1 - pinned);
  std::vector<double> scratch;
  simplex_project_inplace(free.data(), free.size(), scratch);
  Vector out(n);
  out.head(pinned) = free.head(pinned);
  out(pinned) = 0.0;
  out.tail(n - 1 - pinned) = free.tail(n - 1 - pinned);
  return out;
}

Matrix update_consensus_graph(const Matrix& Q) {
  if (Q.rows() != Q.cols()) throw DimensionMismatch("Q must be square");
  if (Q.rows() < 2) throw InvalidArgument("consensus graph needs n >= 2");
  if (!Q.allFinite()) throw InvalidArgument("Q has non-finite entries");
  const Index n = Q.rows();
  Matrix S(n, n);
  for (Index i = 0; i < n; ++i) S.row(i) = project_row_to_simplex(Q.row(i).transpose(), i).transpose();
  return S;
}

WeightQp build_weight_qp(const Matrix& S, std::span<const Matrix> tops) {
  const auto V = static_cast<Index>(tops.size());
  WeightQp qp;
  qp.A.resize(V, V);
  qp.f.resize(V);
  for (Index p = 0; p < V; ++p) {
    const Matrix& Hp = tops[static_cast<std::size_t>(p)];
    qp.f(p) = (Hp * S.transpose()).cwiseProduct(Hp).sum();
    for (Index q = 0; q <= p; ++q) {
      const double value = (Hp * tops[static_cast<std::size_t>(q)].transpose()).squaredNorm();
      qp.A(p, q) = value;
      qp.A(q, p) = value;
    }
  }
  return qp;
}

double kkt_residual(const WeightQp& qp, const Vector& alpha, double support_tol) {
  const Vector g = qp.A * alpha - qp.f;
  double mu = 0.0;
  int support = 0;
  for (Index v = 0; v < alpha.size(); ++v)
    if (alpha(v) > support_tol) {
      mu += g(v);
      ++support;
    }
  if (support == 0) return std::numeric_limits<double>::infinity();
  mu /= support;
  double worst = 0.0;
  for (Index v = 0; v < alpha.size(); ++v) {
    if (alpha(v) > support_tol)
      worst = std::max(worst, std::abs(g(v) - mu));
    else
      worst = std::max(worst, mu - g(v));
  }
  return worst;
}

namespace {

double gradient_scale(const WeightQp& qp) {
  return std::max({1.0, qp.A.cwiseAbs().maxCoeff(), qp.f.cwiseAbs().maxCoeff()});
}

// Solves the equality-constrained problem on a fixed support exactly.
// Returns false when the support system is singular or the solution leaves
// the nonnegative orthant.
bool solve_on_support(const WeightQp& qp, const std::vector<Index>& support, Vector& alpha) {
  const auto m = static_cast<Index>(support.size());
  Matrix K = Matrix::Zero(m + 1, m + 1);
  Vector rhs(m + 1);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) K(a, b) = qp.A(support[a], support[b]);
    K(a, m) = 1.0;
    K(m, a) = 1.0;
    rhs(a) = qp.f(support[a]);
  }
  rhs(m) = 1.0;
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible()) return false;
  const Vector sol = lu.solve(rhs);
  Vector candidate = Vector::Zero(alpha.size());
  for (Index a = 0; a < m; ++a) {
    if (!(sol(a) >= 0.0)) return false;
    candidate(support[a]) = sol(a);
  }
  candidate /= candidate.sum();
  alpha = candidate;
  return true;
}

}  // namespace

QpSolution solve_weight_qp(const WeightQp& qp, double tol, int max_iters) {
  const Index V = qp.f.size();
  if (V == 0) throw InvalidArgument("weight QP with no views");
  QpSolution out;
  if (V == 1) {
    out.alpha = Vector::Ones(1);
    return out;
  }
  const double scale = gradient_scale(qp);
  const double lipschitz = std::max(qp.A.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff(),
                                    1e-300);

  Vector alpha = Vector::Constant(V, 1.0 / static_cast<double>(V));
  Vector grad = qp.A * alpha - qp.f;
  double step = 1.0 / lipschitz;
  double value = qp.objective(alpha);
  int it = 0;
  for (; it < max_iters; ++it) {
    if (kkt_residual(qp, alpha) <= tol * scale) break;
    Vector next = project_to_simplex(alpha - step * grad);
    double next_value = qp.objective(next);
    if (next_value > value) {
      // BB step overshot; fall back to the guaranteed-descent step.
      next = project_to_simplex(alpha - grad / lipschitz);
      next_value = qp.objective(next);
    }
    const Vector next_grad = qp.A * next - qp.f;
    const Vector s = next - alpha;
    const Vector y = next_grad - grad;
    const double sy = s.dot(y);
    if (s.squaredNorm() == 0.0) {
      alpha = next;
      grad = next_grad;
      value = next_value;
      break;
    }
    step = sy > 0.0 ? s.squaredNorm() / sy : 1.0 / lipschitz;
    alpha = next;
    grad = next_grad;
    value = next_value;
  }

  // Polish on the identified support.
  std::vector<Index> support;
  for (Index v = 0; v < V; ++v)
    if (alpha(v) > 1e-12) support.push_back(v);
  Vector polished = alpha;
  if (!support.empty() && solve_on_support(qp, support, polished) &&
      qp.objective(polished) <= value + 1e-15 * std::abs(value) &&
      kkt_residual(qp, polished) <= kkt_residual(qp, alpha)) {
    alpha = polished;
  }

  out.alpha = alpha;
  out.iterations = it;
  out.kkt_residual = kkt_residual(qp, alpha);
  if (out.kkt_residual > tol * scale && it >= max_iters)
    throw SolverStall("weight QP did not reach KKT tolerance in " + std::to_string(max_iters) +
                      " iterations (residual " + std::to_string(out.kkt_residual) + ")");
  return out;
}

Vector update_view_weights(const Matrix& S, std::span<const Matrix> tops) {
  return solve_weight_qp(build_weight_qp(S, tops)).alpha;
}

}  // namespace mvdmf
