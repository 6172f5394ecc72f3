#include "mvdmf/consensus.hpp"
#include "mvdmf/dataio.hpp"
#include "mvdmf/error.hpp"
#include "mvdmf/metrics.hpp"
#include "mvdmf/model.hpp"
#include "mvdmf/pipeline.hpp"
#include "mvdmf/report.hpp"
#include "mvdmf/seminmf.hpp"
#include "mvdmf/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mvdmf;

namespace {

MultiViewDataset make_dataset(const std::vector<Matrix>& views, const std::optional<std::vector<int>>& labels) {
  MultiViewDataset ds;
  ds.views = views;
  ds.labels = labels;
  return ds;
}

FitConfig make_config(const std::vector<Index>& layers, double beta, int max_outer_iters,
                      int pretrain_iters, double tol, int patience, int restarts,
                      std::uint64_t seed, const std::string& schedule) {
  FitConfig cfg;
  cfg.layers.sizes = layers;
  cfg.beta = beta;
  cfg.max_outer_iters = max_outer_iters;
  cfg.pretrain_iters = pretrain_iters;
  cfg.tol_rel_objective = tol;
  cfg.patience = patience;
  cfg.restarts = restarts;
  cfg.rng_seed = seed;
  if (schedule == "snapshot")
    cfg.schedule = ViewSchedule::kSnapshot;
  else if (schedule != "sequential")
    throw InvalidArgument("unknown schedule '" + schedule + "'");
  return cfg;
}

py::dict dataset_dict(const MultiViewDataset& ds) {
  py::dict d;
  d["views"] = ds.views;
  d["labels"] = ds.labels;
  d["name"] = ds.name;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-view deep semi-NMF clustering with a learned consensus graph";

  auto base = py::register_exception<Error>(m, "MvdmfError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<NonFiniteEntry>(m, "NonFiniteEntry", base.ptr());
  py::register_exception<LabelRangeError>(m, "LabelRangeError", base.ptr());
  py::register_exception<LengthMismatch>(m, "LengthMismatch", base.ptr());
  py::register_exception<SolverStall>(m, "SolverStall", base.ptr());
  py::register_exception<InfeasibleGeometry>(m, "InfeasibleGeometry", base.ptr());
  auto io = py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", io.ptr());
  py::register_exception<SchemaVersionMismatch>(m, "SchemaVersionMismatch", io.ptr());
  py::register_exception<MissingFile>(m, "MissingFile", io.ptr());
  py::register_exception<MissingManifest>(m, "MissingManifest", io.ptr());

  m.def(
      "generate_synthetic",
      [](Index n, int k, std::vector<Index> dims, double separation, double noise_sigma, std::uint64_t seed) {
        SyntheticSpec spec{n, k, std::move(dims), separation, noise_sigma, seed};
        return dataset_dict(generate_synthetic(spec));
      },
      py::arg("n") = 300, py::arg("k") = 3, py::arg("dims") = std::vector<Index>{20, 30, 25},
      py::arg("separation") = 10.0, py::arg("noise_sigma") = 0.5, py::arg("seed") = 0);

  m.def(
      "generate_hierarchical",
      [](Index n, int k, int subclusters, std::vector<Index> dims, double separation,
         double sub_separation, double noise_sigma, std::uint64_t seed) {
        HierarchicalSpec spec{n, k, subclusters, std::move(dims), separation, sub_separation, noise_sigma, seed};
        std::vector<int> sub;
        py::dict d = dataset_dict(generate_hierarchical(spec, &sub));
        d["sub_labels"] = sub;
        return d;
      },
      py::arg("n") = 300, py::arg("k") = 3, py::arg("subclusters") = 2,
      py::arg("dims") = std::vector<Index>{20, 30, 25}, py::arg("separation") = 10.0,
      py::arg("sub_separation") = 4.0, py::arg("noise_sigma") = 0.5, py::arg("seed") = 0);

  m.def(
      "normalize_views",
      [](const std::vector<Matrix>& views, const std::string& mode) {
        return normalize_views(make_dataset(views, std::nullopt), parse_normalization(mode)).views;
      },
      py::arg("views"), py::arg("mode") = "unit-sample");

  m.def("load_dataset", [](const std::string& dir) { return dataset_dict(load_dataset(dir)); }, py::arg("path"));
  m.def(
      "save_dataset",
      [](const std::string& dir, const std::vector<Matrix>& views,
         const std::optional<std::vector<int>>& labels, std::optional<int> k, const std::string& name) {
        MultiViewDataset ds = make_dataset(views, labels);
        ds.name = name;
        save_dataset(dir, ds, k);
      },
      py::arg("path"), py::arg("views"), py::arg("labels") = py::none(), py::arg("k") = py::none(),
      py::arg("name") = "dataset");

  m.def(
      "fit_seminmf",
      [](const Matrix& X, Index width, int iters, std::uint64_t seed) {
        const SemiNmfResult r = fit_seminmf(X, width, iters, seed);
        py::dict d;
        d["Z"] = r.Z;
        d["H"] = r.H;
        d["residual"] = r.residual;
        d["history"] = r.history;
        return d;
      },
      py::arg("X"), py::arg("width"), py::arg("iters") = 100, py::arg("seed") = 0);

  m.def(
      "fit",
      [](const std::vector<Matrix>& views, const std::vector<Index>& layers, double beta,
         int max_outer_iters, int pretrain_iters, double tol, int patience, int restarts,
         std::uint64_t seed, const std::string& schedule, int jobs) {
        const FitConfig cfg =
            make_config(layers, beta, max_outer_iters, pretrain_iters, tol, patience, restarts, seed, schedule);
        RestartResult rr;
        {
          py::gil_scoped_release release;
          rr = fit_with_restarts(make_dataset(views, std::nullopt), cfg, jobs);
        }
        py::dict d;
        d["S"] = rr.best.state.S;
        d["alpha"] = rr.best.state.alpha;
        d["tops"] = rr.best.state.tops();
        d["objective_history"] = rr.best.objective_history;
        d["iters_run"] = rr.best.iters_run;
        d["converged"] = rr.best.converged;
        d["best_index"] = rr.best_index;
        std::vector<double> finals;
        for (const RestartSummary& s : rr.runs) finals.push_back(s.final_objective);
        d["final_objectives"] = finals;
        return d;
      },
      py::arg("views"), py::arg("layers"), py::arg("beta") = 1.0, py::arg("max_outer_iters") = 150,
      py::arg("pretrain_iters") = 100, py::arg("tol") = 1e-6, py::arg("patience") = 5,
      py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("schedule") = "sequential",
      py::arg("jobs") = 1);

  m.def(
      "cluster_json",
      [](const std::vector<Matrix>& views, const std::optional<std::vector<int>>& labels,
         const std::vector<Index>& layers, double beta, int max_outer_iters, int pretrain_iters,
         double tol, int patience, int restarts, std::uint64_t seed, std::optional<int> k,
         const std::string& normalization, const std::string& nmi, int kmeans_restarts, int jobs) {
        ClusterOptions o;
        o.fit = make_config(layers, beta, max_outer_iters, pretrain_iters, tol, patience, restarts, seed,
                            "sequential");
        o.k = k;
        if (normalization == "none")
          o.normalize = false;
        else
          o.normalization = parse_normalization(normalization);
        o.nmi = parse_nmi(nmi);
        o.kmeans_restarts = kmeans_restarts;
        o.jobs = jobs;
        const MultiViewDataset ds = make_dataset(views, labels);
        py::gil_scoped_release release;
        return report_to_json(run_cluster(ds, o));
      },
      py::arg("views"), py::arg("labels") = py::none(), py::arg("layers"), py::arg("beta") = 1.0,
      py::arg("max_outer_iters") = 150, py::arg("pretrain_iters") = 100, py::arg("tol") = 1e-6,
      py::arg("patience") = 5, py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("k") = py::none(),
      py::arg("normalization") = "unit-sample", py::arg("nmi") = "geometric",
      py::arg("kmeans_restarts") = 10, py::arg("jobs") = 1);

  m.def(
      "cluster_graph",
      [](const Matrix& S, int k, int restarts, std::uint64_t seed) {
        return cluster_graph(S, k, restarts, seed).labels;
      },
      py::arg("S"), py::arg("k"), py::arg("restarts") = 10, py::arg("seed") = 0);
  m.def(
      "spectral_embed",
      [](const Matrix& S, int k) {
        const SpectralEmbedding e = spectral_embed(S, k);
        return py::make_tuple(e.embedding, e.eigenvalues);
      },
      py::arg("S"), py::arg("k"));
  m.def(
      "kmeans",
      [](const Matrix& points, int k, int restarts, std::uint64_t seed) {
        return kmeans(points, k, restarts, seed).partition.labels;
      },
      py::arg("points"), py::arg("k"), py::arg("restarts") = 10, py::arg("seed") = 0);

  m.def("project_row_to_simplex", &project_row_to_simplex, py::arg("row"), py::arg("pinned"));
  m.def("update_consensus_graph", &update_consensus_graph, py::arg("Q"));
  m.def(
      "solve_weight_qp",
      [](const Matrix& A, const Vector& f) { return solve_weight_qp(WeightQp{A, f}).alpha; },
      py::arg("A"), py::arg("f"));

  m.def("hungarian", &hungarian, py::arg("cost"));
  m.def("accuracy", &accuracy, py::arg("pred"), py::arg("truth"));
  m.def(
      "nmi",
      [](const std::vector<int>& p, const std::vector<int>& t, const std::string& norm) {
        return nmi(p, t, parse_nmi(norm));
      },
      py::arg("pred"), py::arg("truth"), py::arg("normalization") = "geometric");
  m.def("purity", &purity, py::arg("pred"), py::arg("truth"));
  m.def("parse_beta", [](const std::string& s) { return parse_beta(s); }, py::arg("text"));

  m.def("report_to_json_roundtrip", [](const std::string& text) {
    return report_to_json(report_from_json(text));
  }, py::arg("text"));
  m.def(
      "load_report_json", [](const std::string& path) { return report_to_json(load_report(path)); },
      py::arg("path"));
  m.def(
      "save_report_json",
      [](const std::string& text, const std::string& path) { save_report(report_from_json(text), path); },
      py::arg("text"), py::arg("path"));
}
