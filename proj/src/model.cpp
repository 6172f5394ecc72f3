#include "mvdmf/model.hpp"

#include "mvdmf/consensus.hpp"
#include "mvdmf/error.hpp"
#include "mvdmf/finetune.hpp"
#include "mvdmf/parallel.hpp"
#include "mvdmf/pretrain.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>

namespace mvdmf {

ObjectiveTerms objective_terms(const MultiViewDataset& ds, const ModelState& state) {
  if (state.stacks.size() != ds.num_views())
    throw DimensionMismatch("state and dataset disagree on view count");
  ObjectiveTerms terms;
  for (std::size_t v = 0; v < ds.num_views(); ++v) {
    const FactorStack& stack = state.stacks[v];
    Matrix reconstruction = stack.top();
    for (std::size_t i = stack.depth(); i-- > 0;) reconstruction = stack.mappings[i] * reconstruction;
    terms.reconstruction += (ds.views[v] - reconstruction).squaredNorm();
  }
  const auto tops = state.tops();
  terms.graph = (state.S - compute_q(tops, state.alpha)).squaredNorm();
  terms.total = terms.reconstruction + state.beta * terms.graph;
  return terms;
}

double objective(const MultiViewDataset& ds, const ModelState& state) {
  return objective_terms(ds, state).total;
}

namespace {

void outer_iteration(const MultiViewDataset& ds, ModelState& state, ViewSchedule schedule,
                     SolveInfo& info) {
  std::vector<Matrix> tops = state.tops();
  const std::vector<Matrix> snapshot =
      schedule == ViewSchedule::kSnapshot ? tops : std::vector<Matrix>{};
  const std::span<const Matrix> coupled =
      schedule == ViewSchedule::kSnapshot ? std::span<const Matrix>(snapshot)
                                          : std::span<const Matrix>(tops);
  for (std::size_t v = 0; v < ds.num_views(); ++v) {
    const TopCoupling coupling{coupled, state.S, state.alpha, state.beta};
    sweep_view(ds.views[v], state.stacks[v], v, coupling, &info);
    tops[v] = state.stacks[v].top();
  }
  state.S = update_consensus_graph(compute_q(tops, state.alpha));
  state.alpha = update_view_weights(state.S, tops);
}

}  // namespace

FitResult fit(const MultiViewDataset& ds, const FitConfig& cfg, const FitObserver* observer) {
  const auto start = std::chrono::steady_clock::now();
  FitResult result;
  result.seed = cfg.rng_seed;
  result.state = initialize_state(ds, cfg);

  auto report = [&](int iteration, const ObjectiveTerms& terms) {
    if (!observer) return;
    if (observer->on_progress) observer->on_progress({iteration, terms, result.state.alpha});
    if (observer->on_state) observer->on_state(iteration, result.state);
  };

  ObjectiveTerms terms = objective_terms(ds, result.state);
  result.objective_history.push_back(terms.total);
  report(0, terms);

  SolveInfo info;
  int calm = 0;
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    try {
      outer_iteration(ds, result.state, cfg.schedule, info);
    } catch (const Error& e) {
      throw Error("outer iteration " + std::to_string(it) + ": " + e.what());
    }
    terms = objective_terms(ds, result.state);
    const double previous = result.objective_history.back();
    result.objective_history.push_back(terms.total);
    result.iters_run = it;
    report(it, terms);

    if (terms.total > previous * (1.0 + kMonotoneSlack)) ++result.monotonicity_violations;
    const double change = std::abs(previous - terms.total) / std::max(previous, 1e-300);
    calm = change < cfg.tol_rel_objective ? calm + 1 : 0;
    if (calm >= cfg.patience) {
      result.converged = true;
      break;
    }
  }
  result.rank_deficient = info.rank_deficient;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RestartResult fit_with_restarts(const MultiViewDataset& ds, const FitConfig& cfg, int jobs,
                                const std::function<void(std::size_t, const FitResult&)>& on_run,
                                const std::function<void(std::size_t, const IterationRecord&)>& on_progress) {
  cfg.validate();
  const auto count = static_cast<std::size_t>(cfg.restarts);
  RestartResult out;
  out.runs.resize(count);
  std::optional<FitResult> best;
  std::mutex best_mutex;
  parallel_for(count, jobs, [&](std::size_t r) {
    FitConfig run_cfg = cfg;
    run_cfg.rng_seed = cfg.rng_seed + r;
    FitObserver observer;
    if (on_progress) observer.on_progress = [&](const IterationRecord& rec) { on_progress(r, rec); };
    FitResult run = fit(ds, run_cfg, on_progress ? &observer : nullptr);
    if (on_run) on_run(r, run);
    const RestartSummary summary{run.seed, run.objective_history.back(), run.iters_run,
                                 run.converged, run.wall_time};
    std::lock_guard<std::mutex> lock(best_mutex);
    out.runs[r] = summary;
    const bool better = !best || summary.final_objective < best->objective_history.back() ||
                        (summary.final_objective == best->objective_history.back() &&
                         r < out.best_index);
    if (better) {
      best = std::move(run);
      out.best_index = r;
    }
  });
  out.best = std::move(*best);
  return out;
}

}  // namespace mvdmf
