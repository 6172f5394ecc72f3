#include "mvdmf/pipeline.hpp"

#include "mvdmf/error.hpp"
#include "mvdmf/linalg.hpp"
#include "mvdmf/parallel.hpp"
#include "mvdmf/spectral.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mvdmf {

namespace {

// Stream id for the spectral k-means seed of a run.
constexpr std::uint64_t kSpectralStream = 0x5bec7a1ULL;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return value;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_table(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void finish_table(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_scores(std::ostream& out, const std::optional<ClusteringScores>& s) {
  if (s)
    out << ',' << s->acc << ',' << s->nmi << ',' << s->pur;
  else
    out << ",,,";
}

}  // namespace

double parse_beta(std::string_view text) {
  const std::string_view s = trim(text);
  double beta = 0.0;
  if (const auto caret = s.find('^'); caret != std::string_view::npos) {
    const double base = parse_double(s.substr(0, caret), "beta base");
    const double exponent = parse_double(s.substr(caret + 1), "beta exponent");
    beta = std::pow(base, exponent);
  } else {
    beta = parse_double(s, "beta");
  }
  if (!std::isfinite(beta) || beta <= 0.0)
    throw InvalidArgument("beta must be a positive finite number, got '" + std::string(s) + "'");
  return beta;
}

std::vector<Index> parse_index_list(std::string_view text) {
  std::vector<Index> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = trim(text.substr(start, comma - start));
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || value < 1)
      throw InvalidArgument("expected comma-separated positive integers, got '" +
                            std::string(text) + "'");
    out.push_back(static_cast<Index>(value));
    start = comma + 1;
  }
  return out;
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int e = -7; e <= 7; e += 2) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

std::vector<LayerSpec> default_layer_grid(int k, int depth) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const Index kk = k;
  std::vector<LayerSpec> grid;
  switch (depth) {
    case 1:
      grid.push_back({{kk}});
      break;
    case 2:
      for (Index a : {4, 8, 12}) grid.push_back({{a * kk, kk}});
      break;
    case 3:
      for (Index a : {7, 11, 15})
        for (Index b : {2, 3, 4}) grid.push_back({{a * kk, b * kk, kk}});
      break;
    default:
      throw InvalidArgument("default layer grids exist for depths 1 to 3");
  }
  return grid;
}

int default_jobs() {
  const char* env = std::getenv("MVDMF_JOBS");
  if (env == nullptr) return 1;
  const std::string_view s = trim(env);
  int jobs = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), jobs);
  if (ec != std::errc() || ptr != s.data() + s.size() || jobs < 1) return 1;
  return jobs;
}

const char* normalization_name(Normalization n) {
  return n == Normalization::kFeatureMinMax ? "feature-minmax" : "unit-sample";
}

const char* nmi_name(NmiNormalization n) {
  switch (n) {
    case NmiNormalization::kArithmetic: return "arithmetic";
    case NmiNormalization::kMax: return "max";
    default: return "geometric";
  }
}

Normalization parse_normalization(std::string_view name) {
  if (name == "unit-sample") return Normalization::kUnitSample;
  if (name == "feature-minmax") return Normalization::kFeatureMinMax;
  throw InvalidArgument("unknown normalization '" + std::string(name) + "'");
}

NmiNormalization parse_nmi(std::string_view name) {
  if (name == "geometric") return NmiNormalization::kGeometric;
  if (name == "arithmetic") return NmiNormalization::kArithmetic;
  if (name == "max") return NmiNormalization::kMax;
  throw InvalidArgument("unknown NMI normalization '" + std::string(name) + "'");
}

ClusteringReport run_cluster(const MultiViewDataset& ds, const ClusterOptions& opts,
                             const ProgressSink& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  opts.fit.validate();
  if (opts.kmeans_restarts < 1) throw InvalidArgument("kmeans_restarts must be >= 1");
  validate_dataset(ds);
  const MultiViewDataset work = opts.normalize ? normalize_views(ds, opts.normalization) : ds;
  const int k = opts.k.value_or(static_cast<int>(opts.fit.layers.top()));
  if (k < 2) throw InvalidArgument("spectral clustering needs k >= 2");
  validate_layers(opts.fit.layers, work, k);

  const bool labeled = work.labels.has_value();
  const auto runs = static_cast<std::size_t>(opts.fit.restarts);
  std::vector<Partition> partitions(runs);
  std::vector<std::optional<ClusteringScores>> run_scores(runs);

  const auto t_fit = std::chrono::steady_clock::now();
  RestartResult restarts = fit_with_restarts(
      work, opts.fit, opts.jobs,
      [&](std::size_t r, const FitResult& run) {
        if (!labeled) return;
        partitions[r] = cluster_graph(run.state.S, k, opts.kmeans_restarts,
                                      derive_seed(run.seed, kSpectralStream));
        run_scores[r] = score_clustering(partitions[r].labels, *work.labels, opts.nmi);
      },
      progress ? std::function<void(std::size_t, const IterationRecord&)>(progress)
               : std::function<void(std::size_t, const IterationRecord&)>());
  const double fit_seconds = seconds_since(t_fit);

  const FitResult& best = restarts.best;
  Partition selected = labeled ? partitions[restarts.best_index]
                               : cluster_graph(best.state.S, k, opts.kmeans_restarts,
                                               derive_seed(best.seed, kSpectralStream));

  ClusteringReport report;
  report.dataset = ds.name;
  report.n = work.num_samples();
  report.k = k;
  report.config = opts.fit;
  report.normalization = opts.normalize ? normalization_name(opts.normalization) : "none";
  report.nmi_normalization = nmi_name(opts.nmi);
  report.labels = std::move(selected.labels);
  report.objective_history = best.objective_history;
  report.alpha.assign(best.state.alpha.data(), best.state.alpha.data() + best.state.alpha.size());
  report.iters_run = best.iters_run;
  report.converged = best.converged;
  report.selected_run = restarts.best_index;
  for (std::size_t r = 0; r < runs; ++r) {
    const RestartSummary& s = restarts.runs[r];
    report.runs.push_back({s.seed, s.final_objective, s.iters_run, s.converged, s.wall_time,
                           run_scores[r]});
  }
  if (labeled) {
    report.metrics = run_scores[restarts.best_index];
    std::size_t top = 0;
    for (std::size_t r = 1; r < runs; ++r)
      if (run_scores[r]->acc > run_scores[top]->acc) top = r;
    report.best_by_acc_run = top;
  }
  report.fit_seconds = fit_seconds;
  report.total_seconds = seconds_since(t0);
  return report;
}

std::vector<SweepCell> run_sweep(const MultiViewDataset& ds, const ClusterOptions& opts,
                                 const std::vector<double>& betas,
                                 const std::vector<LayerSpec>& grid) {
  if (betas.empty()) throw InvalidArgument("beta grid is empty");
  if (grid.empty()) throw InvalidArgument("layer grid is empty");
  for (double b : betas)
    if (!std::isfinite(b) || b <= 0.0) throw InvalidArgument("beta grid values must be positive");
  validate_dataset(ds);
  const MultiViewDataset work = opts.normalize ? normalize_views(ds, opts.normalization) : ds;

  std::vector<SweepCell> cells;
  for (double b : betas)
    for (const LayerSpec& l : grid) {
      SweepCell cell;
      cell.beta = b;
      cell.layers = l;
      cells.push_back(std::move(cell));
    }

  parallel_for(cells.size(), opts.jobs, [&](std::size_t i) {
    SweepCell& cell = cells[i];
    ClusterOptions cell_opts = opts;
    cell_opts.fit.beta = cell.beta;
    cell_opts.fit.layers = cell.layers;
    cell_opts.normalize = false;
    cell_opts.jobs = 1;
    try {
      validate_layers(cell.layers, work, opts.k.value_or(static_cast<int>(cell.layers.top())));
    } catch (const InvalidArgument& e) {
      cell.status = std::string("skipped: ") + e.what();
      return;
    }
    const ClusteringReport r = run_cluster(work, cell_opts);
    cell.final_objective = r.objective_history.back();
    cell.scores = r.metrics;
    if (r.best_by_acc_run) cell.best_by_acc = r.runs[*r.best_by_acc_run].scores;
  });
  return cells;
}

std::vector<AblationRow> run_ablation(const MultiViewDataset& ds, const ClusterOptions& opts,
                                      const LayerSpec& full) {
  if (full.depth() != 3) throw InvalidArgument("ablation needs a depth-3 layer spec [l1, l2, k]");
  const Index k = full.top();
  const std::vector<LayerSpec> specs = {{{k}}, {{full.sizes[1], k}}, full};
  std::vector<AblationRow> rows;
  for (const LayerSpec& spec : specs) {
    ClusterOptions o = opts;
    o.fit.layers = spec;
    const ClusteringReport r = run_cluster(ds, o);
    rows.push_back({static_cast<int>(spec.depth()), spec, r.objective_history.back(), r.metrics});
  }
  return rows;
}

std::string layers_to_string(const LayerSpec& layers) {
  std::string out;
  for (std::size_t i = 0; i < layers.sizes.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(layers.sizes[i]);
  }
  return out;
}

void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepCell>& cells) {
  std::ofstream out = open_table(path);
  out << "cell,beta,layers,status,objective,acc,nmi,pur,best_acc,best_nmi,best_pur\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const SweepCell& c = cells[i];
    std::string status = c.status;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    out << i << ',' << c.beta << ',' << layers_to_string(c.layers) << ',' << status << ',';
    if (c.status == "ok") out << c.final_objective;
    write_scores(out, c.scores);
    write_scores(out, c.best_by_acc);
    out << '\n';
  }
  finish_table(out, path);
}

void write_ablation_table(const std::filesystem::path& path, const std::vector<AblationRow>& rows) {
  std::ofstream out = open_table(path);
  out << "depth,layers,objective,acc,nmi,pur\n";
  for (const AblationRow& r : rows) {
    out << r.depth << ',' << layers_to_string(r.layers) << ',' << r.final_objective;
    write_scores(out, r.scores);
    out << '\n';
  }
  finish_table(out, path);
}

}  // namespace mvdmf
