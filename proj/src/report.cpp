#include "mvdmf/report.hpp"

#include "mvdmf/error.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace mvdmf {

using nlohmann::json;

namespace {

json scores_to_json(const ClusteringScores& s) { return {{"acc", s.acc}, {"nmi", s.nmi}, {"pur", s.pur}}; }

ClusteringScores scores_from_json(const json& j) {
  return {j.at("acc").get<double>(), j.at("nmi").get<double>(), j.at("pur").get<double>()};
}

const char* schedule_name(ViewSchedule s) {
  return s == ViewSchedule::kSnapshot ? "snapshot" : "sequential";
}

ViewSchedule schedule_from(const std::string& name) {
  if (name == "snapshot") return ViewSchedule::kSnapshot;
  if (name == "sequential") return ViewSchedule::kSequential;
  throw InvalidArgument("unknown view schedule '" + name + "'");
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

std::string report_to_json(const ClusteringReport& r) {
  json runs = json::array();
  for (const RunRecord& run : r.runs) {
    json entry = {{"seed", run.seed},
                  {"final_objective", run.final_objective},
                  {"iters_run", run.iters_run},
                  {"converged", run.converged},
                  {"wall_time", run.wall_time}};
    entry["scores"] = run.scores ? scores_to_json(*run.scores) : json(nullptr);
    runs.push_back(std::move(entry));
  }
  std::vector<long long> layers(r.config.layers.sizes.begin(), r.config.layers.sizes.end());
  json doc = {
      {"schema_version", r.schema_version},
      {"dataset", r.dataset},
      {"n", r.n},
      {"k", r.k},
      {"config",
       {{"beta", r.config.beta},
        {"layers", layers},
        {"max_outer_iters", r.config.max_outer_iters},
        {"pretrain_iters", r.config.pretrain_iters},
        {"tol_rel_objective", r.config.tol_rel_objective},
        {"patience", r.config.patience},
        {"restarts", r.config.restarts},
        {"rng_seed", r.config.rng_seed},
        {"schedule", schedule_name(r.config.schedule)}}},
      {"normalization", r.normalization},
      {"nmi_normalization", r.nmi_normalization},
      {"labels", r.labels},
      {"metrics", r.metrics ? scores_to_json(*r.metrics) : json(nullptr)},
      {"objective_history", r.objective_history},
      {"alpha", r.alpha},
      {"iters_run", r.iters_run},
      {"converged", r.converged},
      {"selected_run", r.selected_run},
      {"best_by_acc_run", r.best_by_acc_run ? json(*r.best_by_acc_run) : json(nullptr)},
      {"runs", runs},
      {"timing", {{"fit_seconds", r.fit_seconds}, {"total_seconds", r.total_seconds}}},
  };
  return doc.dump(2);
}

ClusteringReport report_from_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    throw ParseError(source, line, column, e.what());
  }
  ClusteringReport r;
  try {
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion)
      throw SchemaVersionMismatch(source + ": report schema version " +
                                  std::to_string(r.schema_version) + ", expected " +
                                  std::to_string(kReportSchemaVersion));
    r.dataset = doc.at("dataset").get<std::string>();
    r.n = doc.at("n").get<Index>();
    r.k = doc.at("k").get<int>();
    const json& c = doc.at("config");
    r.config.beta = c.at("beta").get<double>();
    for (long long l : c.at("layers").get<std::vector<long long>>()) r.config.layers.sizes.push_back(l);
    r.config.max_outer_iters = c.at("max_outer_iters").get<int>();
    r.config.pretrain_iters = c.at("pretrain_iters").get<int>();
    r.config.tol_rel_objective = c.at("tol_rel_objective").get<double>();
    r.config.patience = c.at("patience").get<int>();
    r.config.restarts = c.at("restarts").get<int>();
    r.config.rng_seed = c.at("rng_seed").get<std::uint64_t>();
    r.config.schedule = schedule_from(c.at("schedule").get<std::string>());
    r.normalization = doc.at("normalization").get<std::string>();
    r.nmi_normalization = doc.at("nmi_normalization").get<std::string>();
    r.labels = doc.at("labels").get<std::vector<int>>();
    if (!doc.at("metrics").is_null()) r.metrics = scores_from_json(doc["metrics"]);
    r.objective_history = doc.at("objective_history").get<std::vector<double>>();
    r.alpha = doc.at("alpha").get<std::vector<double>>();
    r.iters_run = doc.at("iters_run").get<int>();
    r.converged = doc.at("converged").get<bool>();
    r.selected_run = doc.at("selected_run").get<std::size_t>();
    if (!doc.at("best_by_acc_run").is_null()) r.best_by_acc_run = doc["best_by_acc_run"].get<std::size_t>();
    for (const json& entry : doc.at("runs")) {
      RunRecord run;
      run.seed = entry.at("seed").get<std::uint64_t>();
      run.final_objective = entry.at("final_objective").get<double>();
      run.iters_run = entry.at("iters_run").get<int>();
      run.converged = entry.at("converged").get<bool>();
      run.wall_time = entry.at("wall_time").get<double>();
      if (!entry.at("scores").is_null()) run.scores = scores_from_json(entry["scores"]);
      r.runs.push_back(run);
    }
    r.fit_seconds = doc.at("timing").at("fit_seconds").get<double>();
    r.total_seconds = doc.at("timing").at("total_seconds").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(source, 1, 1, std::string("malformed report: ") + e.what());
  }
  return r;
}

void save_report(const ClusteringReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_json(report) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

ClusteringReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return report_from_json(text.str(), path.string());
}

void write_convergence_curve(const std::filesystem::path& path, const std::vector<double>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iteration,objective\n" << std::setprecision(17);
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << history[i] << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mvdmf
