#pragma once

#include "mvdmf/metrics.hpp"
#include "mvdmf/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mvdmf {

inline constexpr int kReportSchemaVersion = 1;

struct RunRecord {
  std::uint64_t seed = 0;
  double final_objective = 0.0;
  int iters_run = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::optional<ClusteringScores> scores;  // when ground truth was available

  bool operator==(const RunRecord&) const = default;
};

// Everything a clustering run produces, serialized as JSON.
struct ClusteringReport {
  int schema_version = kReportSchemaVersion;
  std::string dataset;
  Index n = 0;
  int k = 0;
  FitConfig config;
  std::string normalization = "unit-sample";
  std::string nmi_normalization = "geometric";

  std::vector<int> labels;
  std::optional<ClusteringScores> metrics;
  std::vector<double> objective_history;
  std::vector<double> alpha;
  int iters_run = 0;
  bool converged = false;

  std::size_t selected_run = 0;  // lowest final objective
  std::optional<std::size_t> best_by_acc_run;
  std::vector<RunRecord> runs;

  double fit_seconds = 0.0;    // all restarts
  double total_seconds = 0.0;  // including spectral clustering and scoring

  bool operator==(const ClusteringReport&) const = default;
};

// Doubles are written with round-trip precision.
std::string report_to_json(const ClusteringReport& report);
ClusteringReport report_from_json(const std::string& text, const std::string& source = "<string>");

void save_report(const ClusteringReport& report, const std::filesystem::path& path);
ClusteringReport load_report(const std::filesystem::path& path);

// Two-column CSV "iteration,objective" for plotting convergence curves.
void write_convergence_curve(const std::filesystem::path& path, const std::vector<double>& history);

}  // namespace mvdmf
