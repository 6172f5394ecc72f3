// mvdmf: multi-view deep matrix factorization clustering from the command line.

#include "mvdmf/dataio.hpp"
#include "mvdmf/error.hpp"
#include "mvdmf/pipeline.hpp"
#include "mvdmf/report.hpp"
#include "mvdmf/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mvdmf;

namespace {

struct CommonArgs {
  std::string data;
  std::string out;
  std::string layers;
  std::string beta = "1";
  int max_iter = 150;
  int pretrain_iter = 100;
  double tol = 1e-6;
  int patience = 5;
  int restarts = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  int k = 0;
  std::string normalization = "unit-sample";
  std::string nmi = "geometric";
  int kmeans_restarts = 10;
  std::string schedule = "sequential";
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_beta, bool layers_required) {
  cmd->add_option("--data", a.data, "Dataset directory holding manifest.json")->required();
  cmd->add_option("--out", a.out, "Output path")->required();
  auto* layers = cmd->add_option("--layers", a.layers, "Layer widths, e.g. 21,9,3 (last = k)");
  if (layers_required) layers->required();
  if (with_beta)
    cmd->add_option("--beta", a.beta, "Graph weight: decimal or 2^e")->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "Maximum outer iterations")->capture_default_str();
  cmd->add_option("--pretrain-iter", a.pretrain_iter, "Semi-NMF sweeps per pretraining layer")
      ->capture_default_str();
  cmd->add_option("--tol", a.tol, "Relative objective change for convergence")->capture_default_str();
  cmd->add_option("--patience", a.patience, "Consecutive small changes before stopping")
      ->capture_default_str();
  cmd->add_option("--restarts", a.restarts, "Restarts with seeds seed, seed+1, ...")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Base random seed")->capture_default_str();
  cmd->add_option("--jobs", a.jobs, "Worker threads (default from MVDMF_JOBS, else 1)")
      ->capture_default_str();
  cmd->add_option("--k", a.k, "Cluster count (default: manifest k, label classes, then last layer width)");
  cmd->add_option("--normalization", a.normalization, "unit-sample, feature-minmax or none")
      ->capture_default_str();
  cmd->add_option("--nmi", a.nmi, "NMI normalization: geometric, arithmetic or max")
      ->capture_default_str();
  cmd->add_option("--kmeans-restarts", a.kmeans_restarts, "k-means restarts on the embedding")
      ->capture_default_str();
  cmd->add_option("--schedule", a.schedule,
                  "sequential (freshest top factors of other views) or snapshot")
      ->capture_default_str();
  cmd->add_flag("--quiet", a.quiet, "Suppress progress records on stderr");
}

ClusterOptions to_options(const CommonArgs& a) {
  ClusterOptions o;
  o.fit.beta = parse_beta(a.beta);
  if (!a.layers.empty()) o.fit.layers.sizes = parse_index_list(a.layers);
  o.fit.max_outer_iters = a.max_iter;
  o.fit.pretrain_iters = a.pretrain_iter;
  o.fit.tol_rel_objective = a.tol;
  o.fit.patience = a.patience;
  o.fit.restarts = a.restarts;
  o.fit.rng_seed = a.seed;
  if (a.schedule == "snapshot")
    o.fit.schedule = ViewSchedule::kSnapshot;
  else if (a.schedule != "sequential")
    throw InvalidArgument("unknown schedule '" + a.schedule + "'");
  if (a.jobs < 1) throw InvalidArgument("--jobs must be >= 1");
  o.jobs = a.jobs;
  if (a.k != 0) o.k = a.k;
  if (a.normalization == "none")
    o.normalize = false;
  else
    o.normalization = parse_normalization(a.normalization);
  o.nmi = parse_nmi(a.nmi);
  o.kmeans_restarts = a.kmeans_restarts;
  return o;
}

// Writes to a sibling temporary file and renames, so a failed command never
// leaves a partial artifact behind under the requested name.
template <typename Writer>
void write_atomically(const fs::path& path, Writer&& writer) {
  if (path.has_parent_path() && !fs::exists(path.parent_path()))
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".partial";
  try {
    writer(tmp);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

// Cluster count: --k, else the manifest's k, else the number of label classes.
std::optional<int> resolve_k(const CommonArgs& a, const DatasetManifest& m, const MultiViewDataset& ds) {
  if (a.k != 0) return a.k;
  if (m.k) return m.k;
  if (ds.labels) return ds.num_classes();
  return std::nullopt;
}

class ProgressLog {
 public:
  explicit ProgressLog(bool quiet) : quiet_(quiet) {}

  void iteration(std::size_t run, const IterationRecord& rec) {
    if (quiet_) return;
    emit({{"event", "iteration"},
          {"run", run},
          {"iteration", rec.iteration},
          {"objective", rec.terms.total},
          {"reconstruction", rec.terms.reconstruction},
          {"graph", rec.terms.graph},
          {"alpha", std::vector<double>(rec.alpha.data(), rec.alpha.data() + rec.alpha.size())}});
  }

  void emit(const nlohmann::json& record) {
    if (quiet_) return;
    std::lock_guard<std::mutex> lock(mutex_);
    std::cerr << record.dump() << '\n';
  }

  ProgressSink sink() {
    if (quiet_) return {};
    return [this](std::size_t run, const IterationRecord& rec) { iteration(run, rec); };
  }

 private:
  bool quiet_;
  std::mutex mutex_;
};

int cmd_cluster(const CommonArgs& a, const std::string& curve) {
  ClusterOptions opts = to_options(a);
  if (opts.fit.layers.sizes.empty()) throw InvalidArgument("--layers is required");
  DatasetManifest manifest;
  const MultiViewDataset ds = load_dataset(a.data, &manifest);
  opts.k = resolve_k(a, manifest, ds);
  ProgressLog log(a.quiet);
  const ClusteringReport report = run_cluster(ds, opts, log.sink());
  write_atomically(a.out, [&](const fs::path& p) { save_report(report, p); });
  if (!curve.empty())
    write_atomically(curve, [&](const fs::path& p) { write_convergence_curve(p, report.objective_history); });
  nlohmann::json done = {{"event", "done"}, {"out", a.out}, {"objective", report.objective_history.back()}};
  if (report.metrics) done["acc"] = report.metrics->acc, done["nmi"] = report.metrics->nmi;
  log.emit(done);
  return 0;
}

int cmd_sweep(const CommonArgs& a, const std::optional<std::string>& betas_opt,
              const std::vector<std::string>& grid_text, int depth) {
  CommonArgs base = a;
  base.layers.clear();
  ClusterOptions opts = to_options(base);
  DatasetManifest manifest;
  const MultiViewDataset ds = load_dataset(a.data, &manifest);
  opts.k = resolve_k(a, manifest, ds);

  std::vector<double> betas;
  if (!betas_opt) {
    betas = default_beta_grid();
  } else {
    const std::string& betas_text = *betas_opt;
    std::size_t start = 0;
    while (start <= betas_text.size()) {
      const std::size_t comma = std::min(betas_text.find(',', start), betas_text.size());
      betas.push_back(parse_beta(betas_text.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  std::vector<LayerSpec> grid;
  if (!grid_text.empty()) {
    for (const std::string& spec : grid_text) grid.push_back({parse_index_list(spec)});
  } else {
    if (!opts.k) throw InvalidArgument("pass --k or --layer-grid when the dataset declares no k");
    grid = default_layer_grid(*opts.k, depth);
  }

  ProgressLog log(a.quiet);
  log.emit({{"event", "sweep"}, {"cells", betas.size() * grid.size()}});
  const std::vector<SweepCell> cells = run_sweep(ds, opts, betas, grid);
  write_atomically(a.out, [&](const fs::path& p) { write_sweep_table(p, cells); });
  log.emit({{"event", "done"}, {"out", a.out}, {"cells", cells.size()}});
  return 0;
}

int cmd_ablate(const CommonArgs& a) {
  ClusterOptions opts = to_options(a);
  if (opts.fit.layers.depth() != 3) throw InvalidArgument("--layers must be l1,l2,k");
  DatasetManifest manifest;
  const MultiViewDataset ds = load_dataset(a.data, &manifest);
  opts.k = resolve_k(a, manifest, ds);
  ProgressLog log(a.quiet);
  const std::vector<AblationRow> rows = run_ablation(ds, opts, opts.fit.layers);
  write_atomically(a.out, [&](const fs::path& p) { write_ablation_table(p, rows); });
  for (const AblationRow& r : rows) {
    nlohmann::json rec = {{"event", "depth"}, {"depth", r.depth}, {"layers", layers_to_string(r.layers)}};
    if (r.scores) rec["acc"] = r.scores->acc;
    log.emit(rec);
  }
  return 0;
}

struct SynthArgs {
  Index n = 300;
  int k = 3;
  int views = 3;
  std::string dims = "20,30,25";
  double sigma = 0.5;
  double separation = 10.0;
  std::uint64_t seed = 0;
  std::string out;
  bool hierarchical = false;
  int subclusters = 2;
  double sub_separation = 4.0;
};

int cmd_synth(const SynthArgs& a) {
  if (a.k < 1) throw InvalidArgument("--k must be >= 1");
  if (a.views < 1) throw InvalidArgument("--views must be >= 1");
  if (a.n < 2 * a.k) throw InvalidArgument("--n must be at least 2k");
  if (!(a.sigma >= 0.0)) throw InvalidArgument("--sigma must be >= 0");
  if (!(a.separation > 0.0)) throw InvalidArgument("--separation must be > 0");
  std::vector<Index> dims = parse_index_list(a.dims);
  if (dims.size() == 1) dims.assign(static_cast<std::size_t>(a.views), dims.front());
  if (dims.size() != static_cast<std::size_t>(a.views))
    throw InvalidArgument("--dims needs one entry per view or a single shared value");

  MultiViewDataset ds;
  if (a.hierarchical) {
    HierarchicalSpec spec;
    spec.n = a.n, spec.k = a.k, spec.subclusters = a.subclusters, spec.dims = dims;
    spec.separation = a.separation, spec.sub_separation = a.sub_separation;
    spec.noise_sigma = a.sigma, spec.seed = a.seed;
    ds = generate_hierarchical(spec);
  } else {
    SyntheticSpec spec;
    spec.n = a.n, spec.k = a.k, spec.dims = dims;
    spec.separation = a.separation, spec.noise_sigma = a.sigma, spec.seed = a.seed;
    ds = generate_synthetic(spec);
  }
  save_dataset(a.out, ds, a.k >= 2 ? std::optional<int>(a.k) : std::nullopt);
  return 0;
}

struct BaselineArgs {
  std::string data;
  std::string out;
  int k = 0;
  int restarts = 10;
  std::uint64_t seed = 0;
  std::string normalization = "unit-sample";
  std::string nmi = "geometric";
};

int cmd_baseline(const BaselineArgs& a) {
  MultiViewDataset ds = load_dataset(a.data);
  if (a.normalization != "none") ds = normalize_views(ds, parse_normalization(a.normalization));
  const NmiNormalization nmi = parse_nmi(a.nmi);
  const int k = a.k != 0 ? a.k : (ds.labels ? ds.num_classes() : 0);
  if (k < 2) throw InvalidArgument("pass --k for unlabeled data");
  const std::vector<int>* truth = ds.labels ? &*ds.labels : nullptr;
  const BaselineResult bkm = best_view_kmeans(ds, k, a.restarts, a.seed, truth);
  const Partition akm = concatenated_kmeans(ds, k, a.restarts, a.seed);
  nlohmann::json doc = {{"k", k},
                        {"bkm", {{"view", bkm.view}, {"labels", bkm.partition.labels}}},
                        {"akm", {{"labels", akm.labels}}}};
  if (truth) {
    for (auto [name, labels] : {std::pair{"bkm", &bkm.partition.labels}, std::pair{"akm", &akm.labels}}) {
      const ClusteringScores s = score_clustering(*labels, *truth, nmi);
      doc[name]["scores"] = {{"acc", s.acc}, {"nmi", s.nmi}, {"pur", s.pur}};
    }
  }
  write_atomically(a.out, [&](const fs::path& p) {
    std::ofstream out(p);
    out << doc.dump(2) << '\n';
    if (!out.flush()) throw IoError("failed writing " + p.string());
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multi-view clustering by deep semi-NMF with a learned consensus graph.\n"
      "Final partitions come from normalized spectral clustering on the consensus "
      "graph (symmetrize, L_sym = I - D^-1/2 W D^-1/2, row-normalized eigenvectors, k-means)."};
  app.require_subcommand(1);

  CommonArgs cluster_args, sweep_args, ablate_args;
  cluster_args.jobs = sweep_args.jobs = ablate_args.jobs = default_jobs();

  std::string curve;
  auto* cluster = app.add_subcommand("cluster", "Fit, cluster and write a JSON report");
  add_common(cluster, cluster_args, true, true);
  cluster->add_option("--curve", curve, "Also write the objective history as CSV");

  std::optional<std::string> betas;
  std::vector<std::string> grid;
  int depth = 3;
  auto* sweep = app.add_subcommand("sweep", "Grid over beta and layer widths, CSV table out");
  add_common(sweep, sweep_args, false, false);
  sweep->add_option("--betas", betas, "Comma list of betas (default 2^-7,2^-5,...,2^7)");
  sweep->add_option("--layer-grid", grid, "One or more layer specs, e.g. 21,6,3 33,9,3 (default: a grid built from k and --depth)");
  sweep->add_option("--depth", depth, "Depth of the default layer grid (1-3)")->capture_default_str();

  auto* ablate = app.add_subcommand("ablate", "Depths [k], [l2,k], [l1,l2,k], CSV table out");
  add_common(ablate, ablate_args, true, true);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a planted-cluster dataset directory");
  synth->add_option("--n", synth_args.n, "Samples")->capture_default_str();
  synth->add_option("--k", synth_args.k, "Clusters")->capture_default_str();
  synth->add_option("--views", synth_args.views, "Views")->capture_default_str();
  synth->add_option("--dims", synth_args.dims, "Per-view feature counts")->capture_default_str();
  synth->add_option("--sigma", synth_args.sigma, "Noise standard deviation")->capture_default_str();
  synth->add_option("--separation", synth_args.separation, "Distance between cluster centers")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "Output directory")->required();
  synth->add_flag("--hierarchical", synth_args.hierarchical, "Two-level clusters; labels are the top level");
  synth->add_option("--subclusters", synth_args.subclusters, "Children per cluster (hierarchical)")
      ->capture_default_str();
  synth->add_option("--sub-separation", synth_args.sub_separation,
                    "Distance between children of one cluster (hierarchical)")
      ->capture_default_str();

  BaselineArgs baseline_args;
  auto* baseline = app.add_subcommand("baseline", "Best-view and concatenated k-means, JSON out");
  baseline->add_option("--data", baseline_args.data, "Dataset directory")->required();
  baseline->add_option("--out", baseline_args.out, "Output JSON")->required();
  baseline->add_option("--k", baseline_args.k, "Cluster count (default: label classes)");
  baseline->add_option("--restarts", baseline_args.restarts, "k-means restarts")->capture_default_str();
  baseline->add_option("--seed", baseline_args.seed, "Random seed")->capture_default_str();
  baseline->add_option("--normalization", baseline_args.normalization,
                       "unit-sample, feature-minmax or none")
      ->capture_default_str();
  baseline->add_option("--nmi", baseline_args.nmi, "geometric, arithmetic or max")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) return cmd_cluster(cluster_args, curve);
    if (sweep->parsed()) return cmd_sweep(sweep_args, betas, grid, depth);
    if (ablate->parsed()) return cmd_ablate(ablate_args);
    if (synth->parsed()) return cmd_synth(synth_args);
    if (baseline->parsed()) return cmd_baseline(baseline_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
