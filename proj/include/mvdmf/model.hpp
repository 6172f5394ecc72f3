#pragma once

#include "mvdmf/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace mvdmf {

struct ObjectiveTerms {
  double reconstruction = 0.0;  // sum_v ||X_v - Z_1 ... Z_m H_m||_F^2
  double graph = 0.0;           // ||S - sum_v alpha_v H_m^T H_m||_F^2
  double total = 0.0;           // reconstruction + beta * graph
};

ObjectiveTerms objective_terms(const MultiViewDataset& ds, const ModelState& state);
double objective(const MultiViewDataset& ds, const ModelState& state);

// Emitted once for the initial state (iteration 0) and after every outer
// iteration.
struct IterationRecord {
  int iteration = 0;
  ObjectiveTerms terms;
  Vector alpha;
};

struct FitObserver {
  std::function<void(const IterationRecord&)> on_progress;
  // Sees the full state after each outer iteration (and at iteration 0).
  std::function<void(int, const ModelState&)> on_state;
};

struct FitResult {
  ModelState state;
  std::vector<double> objective_history;  // length iters_run + 1
  int iters_run = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds, initialization included
  std::uint64_t seed = 0;
  int rank_deficient = 0;            // unexpectedly singular solves in fine-tuning
  int monotonicity_violations = 0;   // steps rising by more than 1e-8 relative
};

// Relative slack allowed between consecutive objective values.
inline constexpr double kMonotoneSlack = 1e-8;

// Initializes, then alternates the per-view factor sweeps, the consensus
// graph update and the view-weight update until the relative objective change
// stays below cfg.tol_rel_objective for cfg.patience iterations or
// cfg.max_outer_iters is reached.
FitResult fit(const MultiViewDataset& ds, const FitConfig& cfg, const FitObserver* observer = nullptr);

struct RestartSummary {
  std::uint64_t seed = 0;
  double final_objective = 0.0;
  int iters_run = 0;
  bool converged = false;
  double wall_time = 0.0;
};

struct RestartResult {
  FitResult best;
  std::size_t best_index = 0;
  std::vector<RestartSummary> runs;
};

// Runs fit with seeds cfg.rng_seed, cfg.rng_seed + 1, ... and keeps the run
// with the lowest final objective (lowest index on ties). `on_run` sees every
// run as it finishes and `on_progress` every iteration record tagged with the
// run index; with jobs > 1 both may be called concurrently.
RestartResult fit_with_restarts(
    const MultiViewDataset& ds, const FitConfig& cfg, int jobs = 1,
    const std::function<void(std::size_t, const FitResult&)>& on_run = {},
    const std::function<void(std::size_t, const IterationRecord&)>& on_progress = {});

}  // namespace mvdmf
