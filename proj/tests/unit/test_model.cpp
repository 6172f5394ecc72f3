#include "mvdmf/dataio.hpp"
#include "mvdmf/model.hpp"
#include "mvdmf/pretrain.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace mvdmf;

namespace {

MultiViewDataset planted(Index n, std::vector<Index> dims, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n;
  spec.dims = std::move(dims);
  spec.seed = seed;
  return normalize_views(generate_synthetic(spec));
}

FitConfig config(LayerSpec layers, int iters, double beta = 1.0) {
  FitConfig cfg;
  cfg.layers = std::move(layers);
  cfg.max_outer_iters = iters;
  cfg.pretrain_iters = 50;
  cfg.beta = beta;
  cfg.tol_rel_objective = 0.0;
  return cfg;
}

}  // namespace

TEST(Objective, MatchesIndependentEvaluation) {
  const MultiViewDataset ds = planted(40, {10, 12}, 1);
  for (double beta : {0.01, 1.0, 50.0}) {
    ModelState st = initialize_state(ds, config({{6, 3}}, 0, beta));
    st.beta = beta;
    const ObjectiveTerms t = objective_terms(ds, st);
    const double ref = oracle::objective(ds, st);
    EXPECT_NEAR(t.total, ref, 1e-10 * ref);
    EXPECT_NEAR(t.total, t.reconstruction + beta * t.graph, 1e-12 * t.total);
    EXPECT_GE(t.reconstruction, 0.0);
    EXPECT_GE(t.graph, 0.0);
  }
}

TEST(Fit, ZeroIterationsReturnsInitialState) {
  const MultiViewDataset ds = planted(40, {10, 12}, 2);
  const FitConfig cfg = config({{6, 3}}, 0);
  const FitResult r = fit(ds, cfg);
  EXPECT_EQ(r.objective_history.size(), 1u);
  EXPECT_EQ(r.iters_run, 0);
  const ModelState init = initialize_state(ds, cfg);
  EXPECT_EQ(r.state.S, init.S);
  EXPECT_DOUBLE_EQ(r.objective_history[0], objective(ds, init));
}

TEST(Fit, DeterministicUnderSeed) {
  const MultiViewDataset ds = planted(50, {10, 12, 11}, 3);
  const FitConfig cfg = config({{6, 3}}, 15);
  const FitResult a = fit(ds, cfg);
  const FitResult b = fit(ds, cfg);
  EXPECT_EQ(a.objective_history, b.objective_history);
  EXPECT_EQ(a.state.S, b.state.S);
  EXPECT_EQ(a.state.alpha, b.state.alpha);
  FitConfig other = cfg;
  other.rng_seed = 1;
  EXPECT_NE(fit(ds, other).objective_history, a.objective_history);
}

TEST(Fit, InvariantsAndDescentEveryIteration) {
  const MultiViewDataset ds = planted(90, {15, 20, 18}, 4);
  for (double beta : {0.125, 1.0, 8.0}) {
    int checked = 0;
    FitObserver obs;
    obs.on_state = [&](int, const ModelState& st) {
      const auto violations = check_state_invariants(st);
      EXPECT_TRUE(violations.empty()) << (violations.empty() ? "" : violations.front());
      ++checked;
    };
    const FitResult r = fit(ds, config({{9, 3}}, 40, beta), &obs);
    EXPECT_EQ(checked, r.iters_run + 1);
    EXPECT_EQ(r.objective_history.size(), static_cast<std::size_t>(r.iters_run + 1));
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
      EXPECT_LE(r.objective_history[i], r.objective_history[i - 1] * (1 + kMonotoneSlack))
          << "beta " << beta << " iter " << i;
    EXPECT_EQ(r.monotonicity_violations, 0);
    EXPECT_LE(r.objective_history.back(), r.objective_history.front());
  }
}

TEST(Fit, ProgressRecordsMatchHistory) {
  const MultiViewDataset ds = planted(40, {10, 12}, 5);
  std::vector<IterationRecord> records;
  FitObserver obs;
  obs.on_progress = [&](const IterationRecord& rec) { records.push_back(rec); };
  const FitResult r = fit(ds, config({{6, 3}}, 8), &obs);
  ASSERT_EQ(records.size(), r.objective_history.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].iteration, static_cast<int>(i));
    EXPECT_DOUBLE_EQ(records[i].terms.total, r.objective_history[i]);
    EXPECT_EQ(records[i].alpha.size(), 2);
  }
}

TEST(Fit, EarlyStopNeedsPatience) {
  const MultiViewDataset ds = planted(40, {10, 12}, 6);
  FitConfig cfg = config({{6, 3}}, 150);
  cfg.tol_rel_objective = 1e-3;
  cfg.patience = 3;
  const FitResult r = fit(ds, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.iters_run, 150);
  const auto& h = r.objective_history;
  for (int t = 0; t < 3; ++t) {
    const std::size_t i = h.size() - 1 - t;
    EXPECT_LT(std::abs(h[i - 1] - h[i]) / h[i - 1], 1e-3);
  }
}

TEST(Fit, SnapshotScheduleAlsoDescends) {
  const MultiViewDataset ds = planted(60, {12, 14, 13}, 7);
  FitConfig cfg = config({{6, 3}}, 30);
  cfg.schedule = ViewSchedule::kSnapshot;
  const FitResult r = fit(ds, cfg);
  EXPECT_TRUE(check_state_invariants(r.state).empty());
  EXPECT_LE(r.objective_history.back(), r.objective_history.front());
}

TEST(Restarts, SingleRestartIsFit) {
  const MultiViewDataset ds = planted(40, {10, 12}, 8);
  FitConfig cfg = config({{6, 3}}, 10);
  cfg.rng_seed = 4;
  const RestartResult rr = fit_with_restarts(ds, cfg);
  const FitResult r = fit(ds, cfg);
  EXPECT_EQ(rr.best.objective_history, r.objective_history);
  EXPECT_EQ(rr.best_index, 0u);
  ASSERT_EQ(rr.runs.size(), 1u);
  EXPECT_EQ(rr.runs[0].seed, 4u);
}

TEST(Restarts, ReturnsMinimumOfRecordedFinals) {
  const MultiViewDataset ds = planted(60, {12, 14, 13}, 9);
  FitConfig cfg = config({{6, 3}}, 15);
  cfg.restarts = 5;
  cfg.rng_seed = 10;
  for (int jobs : {1, 3}) {
    const RestartResult rr = fit_with_restarts(ds, cfg, jobs);
    ASSERT_EQ(rr.runs.size(), 5u);
    double lowest = rr.runs[0].final_objective;
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(rr.runs[i].seed, 10 + i);
      lowest = std::min(lowest, rr.runs[i].final_objective);
    }
    EXPECT_EQ(rr.best.objective_history.back(), lowest);
    EXPECT_EQ(rr.runs[rr.best_index].final_objective, lowest);
  }
  // Worker count must not change the outcome.
  EXPECT_EQ(fit_with_restarts(ds, cfg, 1).best.objective_history,
            fit_with_restarts(ds, cfg, 4).best.objective_history);
}

TEST(Restarts, TiesKeepLowestIndex) {
  // Identical duplicated samples: every run converges to the same objective.
  MultiViewDataset ds;
  Matrix X(4, 6);
  X << 1, 1, 1, 0, 0, 0,
       1, 1, 1, 0, 0, 0,
       0, 0, 0, 1, 1, 1,
       0, 0, 0, 1, 1, 1;
  ds.views = {X, X};
  FitConfig cfg = config({{2}}, 30);
  cfg.restarts = 3;
  const RestartResult rr = fit_with_restarts(ds, cfg);
  const double lowest = rr.best.objective_history.back();
  for (const RestartSummary& s : rr.runs) EXPECT_GE(s.final_objective, lowest);
  for (std::size_t i = 0; i < rr.best_index; ++i) EXPECT_GT(rr.runs[i].final_objective, lowest);
}

TEST(Fit, ErrorsCarryIterationContext) {
  const MultiViewDataset ds = planted(40, {10, 12}, 11);
  FitConfig cfg = config({{20, 3}}, 5);  // wider than the views
  EXPECT_ANY_THROW(fit(ds, cfg));
}
