#pragma once

#include "mvdmf/dataio.hpp"
#include "mvdmf/metrics.hpp"
#include "mvdmf/model.hpp"
#include "mvdmf/report.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mvdmf {

// Accepts plain decimals ("0.125") and powers of two ("2^-3"). The result
// must be finite and positive.
double parse_beta(std::string_view text);

// Comma-separated positive integers, e.g. "21,9,3".
std::vector<Index> parse_index_list(std::string_view text);

// 2^-7, 2^-5, ..., 2^7.
std::vector<double> default_beta_grid();

// Depth 3: l1 in {7k, 11k, 15k}, l2 in {2k, 3k, 4k}, l3 = k.
// Depth 2: l1 in {4k, 8k, 12k}, l2 = k.
// Depth 1: [k].
std::vector<LayerSpec> default_layer_grid(int k, int depth);

// Reads MVDMF_JOBS; falls back to 1 when unset or unparsable.
int default_jobs();

struct ClusterOptions {
  FitConfig fit;
  std::optional<int> k;  // defaults to the number of label classes or the top width
  bool normalize = true;
  Normalization normalization = Normalization::kUnitSample;
  NmiNormalization nmi = NmiNormalization::kGeometric;
  int kmeans_restarts = 10;
  int jobs = 1;
};

const char* normalization_name(Normalization n);
const char* nmi_name(NmiNormalization n);
Normalization parse_normalization(std::string_view name);
NmiNormalization parse_nmi(std::string_view name);

using ProgressSink = std::function<void(std::size_t run, const IterationRecord&)>;

// normalize -> fit_with_restarts -> cluster_graph -> metrics. Every restart is
// also clustered and scored when labels exist so best-by-ACC can be reported.
ClusteringReport run_cluster(const MultiViewDataset& ds, const ClusterOptions& opts,
                             const ProgressSink& progress = {});

struct SweepCell {
  double beta = 0.0;
  LayerSpec layers;
  std::string status = "ok";  // "ok" or "skipped: <reason>"
  double final_objective = 0.0;
  std::optional<ClusteringScores> scores;       // selected (lowest objective) restart
  std::optional<ClusteringScores> best_by_acc;  // best restart by ACC
};

// Cells are ordered beta-major and merged by index after the pool drains.
// Layer specs that do not fit the dataset are reported as skipped.
std::vector<SweepCell> run_sweep(const MultiViewDataset& ds, const ClusterOptions& opts,
                                 const std::vector<double>& betas,
                                 const std::vector<LayerSpec>& grid);

struct AblationRow {
  int depth = 0;
  LayerSpec layers;
  double final_objective = 0.0;
  std::optional<ClusteringScores> scores;
};

// Depths [k], [l2, k], [l1, l2, k] from full = [l1, l2, k], all with the same
// iteration budget, restarts and seed.
std::vector<AblationRow> run_ablation(const MultiViewDataset& ds, const ClusterOptions& opts,
                                      const LayerSpec& full);

std::string layers_to_string(const LayerSpec& layers);
void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepCell>& cells);
void write_ablation_table(const std::filesystem::path& path, const std::vector<AblationRow>& rows);

}  // namespace mvdmf
