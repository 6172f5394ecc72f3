#include "mvdmf/dataio.hpp"

#include "mvdmf/error.hpp"
#include "mvdmf/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace mvdmf {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetManifest::validate() const {
  if (view_files.empty()) throw InvalidArgument("manifest lists no view files");
  if (k && *k < 2) throw InvalidArgument("manifest k must be >= 2");
}

namespace {

bool is_separator(char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; }

std::ifstream open_input(const fs::path& file) {
  if (!fs::exists(file)) throw MissingFile(file.string());
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  return in;
}

std::ofstream open_output(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

}  // namespace

Matrix read_matrix(const fs::path& file) {
  std::ifstream in = open_input(file);
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = 0;
    while (pos < line.size() && is_separator(line[pos])) ++pos;
    if (pos == line.size() || line[pos] == '#') continue;
    Index count = 0;
    while (pos < line.size()) {
      double value = 0.0;
      const char* begin = line.data() + pos;
      const char* end = line.data() + line.size();
      if (*begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || (ptr != end && !is_separator(*ptr)))
        throw ParseError(file.string(), line_no, pos + 1, "expected a number");
      values.push_back(value);
      ++count;
      pos = static_cast<std::size_t>(ptr - line.data());
      while (pos < line.size() && is_separator(line[pos])) ++pos;
    }
    if (cols < 0) cols = count;
    if (count != cols)
      throw ParseError(file.string(), line_no, 1,
                       "row has " + std::to_string(count) + " entries, expected " +
                           std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw ParseError(file.string(), line_no, 1, "empty matrix file");
  Matrix M(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) M(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return M;
}

void write_matrix(const fs::path& file, const Matrix& M) {
  std::ofstream out = open_output(file);
  out << std::setprecision(17);
  for (Index r = 0; r < M.rows(); ++r) {
    for (Index c = 0; c < M.cols(); ++c) {
      if (c) out << ',';
      out << M(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

std::vector<int> read_labels(const fs::path& file) {
  std::ifstream in = open_input(file);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    int value = 0;
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw ParseError(file.string(), line_no, first + 1, "expected an integer label");
    labels.push_back(value);
  }
  return labels;
}

void write_labels(const fs::path& file, const std::vector<int>& labels) {
  std::ofstream out = open_output(file);
  for (int l : labels) out << l << '\n';
  if (!out) throw IoError("failed writing " + file.string());
}

DatasetManifest read_manifest(const fs::path& dir) {
  fs::path file = dir / kManifestFile;
  if (!fs::exists(file)) file = dir / "manifest";
  if (!fs::exists(file)) throw MissingManifest("no manifest.json in " + dir.string());
  std::ifstream in(file);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(file.string(), 1, e.byte, e.what());
  }
  DatasetManifest manifest;
  try {
    manifest.name = doc.value("name", dir.filename().string());
    manifest.view_files = doc.at("views").get<std::vector<std::string>>();
    if (doc.contains("labels") && !doc["labels"].is_null())
      manifest.labels_file = doc["labels"].get<std::string>();
    if (doc.contains("k") && !doc["k"].is_null()) manifest.k = doc["k"].get<int>();
  } catch (const json::exception& e) {
    throw ParseError(file.string(), 1, 1, std::string("invalid manifest: ") + e.what());
  }
  manifest.validate();
  return manifest;
}

MultiViewDataset load_dataset(const fs::path& dir, DatasetManifest* manifest_out) {
  const DatasetManifest manifest = read_manifest(dir);
  MultiViewDataset ds;
  ds.name = manifest.name;
  for (const auto& view : manifest.view_files) ds.views.push_back(read_matrix(dir / view));
  if (manifest.labels_file) ds.labels = read_labels(dir / *manifest.labels_file);
  validate_dataset(ds);
  if (manifest.k && ds.labels && ds.num_classes() > *manifest.k)
    throw LabelRangeError("labels use more classes than the declared k");
  if (manifest_out) *manifest_out = manifest;
  return ds;
}

void save_dataset(const fs::path& dir, const MultiViewDataset& ds, std::optional<int> k) {
  validate_dataset(ds);
  fs::create_directories(dir);
  json doc;
  doc["name"] = ds.name;
  std::vector<std::string> files;
  for (std::size_t v = 0; v < ds.num_views(); ++v) {
    files.push_back("view" + std::to_string(v) + ".txt");
    write_matrix(dir / files.back(), ds.views[v]);
  }
  doc["views"] = files;
  if (ds.labels) {
    write_labels(dir / "labels.txt", *ds.labels);
    doc["labels"] = "labels.txt";
  } else {
    doc["labels"] = nullptr;
  }
  if (k) doc["k"] = *k;
  else if (ds.labels) doc["k"] = ds.num_classes();
  else doc["k"] = nullptr;
  std::ofstream out = open_output(dir / kManifestFile);
  out << doc.dump(2) << '\n';
}

MultiViewDataset normalize_views(const MultiViewDataset& ds, Normalization mode, int* untouched) {
  MultiViewDataset out = ds;
  int skipped = 0;
  for (Matrix& X : out.views) {
    if (mode == Normalization::kUnitSample) {
      for (Index c = 0; c < X.cols(); ++c) {
        const double norm = X.col(c).norm();
        if (norm > 0.0) X.col(c) /= norm;
        else ++skipped;
      }
    } else {
      for (Index r = 0; r < X.rows(); ++r) {
        const double lo = X.row(r).minCoeff();
        const double hi = X.row(r).maxCoeff();
        if (hi > lo) X.row(r) = (X.row(r).array() - lo) / (hi - lo);
        else ++skipped;
      }
    }
  }
  if (untouched) *untouched = skipped;
  return out;
}

namespace {

// k points in R^dim with all pairwise distances equal to `edge`, centered at
// the origin and randomly rotated. Returns dim x k.
Matrix simplex_centers(int k, Index dim, double edge, std::mt19937_64& rng) {
  if (k == 1) return Matrix::Zero(dim, 1);
  if (dim < k - 1)
    throw InfeasibleGeometry("placing " + std::to_string(k) + " equidistant centers needs at least " +
                             std::to_string(k - 1) + " dimensions, got " + std::to_string(dim));
  // Orthonormal basis of the complement of the all-ones direction in R^k.
  Matrix seed_basis = Matrix::Identity(k, k);
  seed_basis.col(0).setOnes();
  const Matrix Q = Eigen::HouseholderQR<Matrix>(seed_basis).householderQ();
  const Matrix complement = Q.rightCols(k - 1);  // k x (k-1)
  const Matrix vertices = (edge / std::sqrt(2.0)) * complement.transpose();  // (k-1) x k
  Matrix embedded = Matrix::Zero(dim, k);
  embedded.topRows(k - 1) = vertices;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(dim, dim);
  for (Index c = 0; c < dim; ++c)
    for (Index r = 0; r < dim; ++r) G(r, c) = gauss(rng);
  const Matrix rotation = Eigen::HouseholderQR<Matrix>(G).householderQ();
  return rotation * embedded;
}

std::vector<int> balanced_labels(Index n, int k, std::mt19937_64& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) labels[static_cast<std::size_t>(j)] = static_cast<int>(j % k);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

void check_synthetic(Index n, int k, const std::vector<Index>& dims, double sigma) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n < 2 * k || n < 2) throw InvalidArgument("need n >= 2k samples");
  if (dims.empty()) throw InvalidArgument("need at least one view");
  for (Index d : dims)
    if (d < 1) throw InvalidArgument("view dimensions must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
}

}  // namespace

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) {
  check_synthetic(spec.n, spec.k, spec.dims, spec.noise_sigma);
  std::mt19937_64 rng(spec.seed);
  MultiViewDataset ds;
  ds.name = "synthetic";
  const std::vector<int> labels = balanced_labels(spec.n, spec.k, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index d : spec.dims) {
    const Matrix centers = simplex_centers(spec.k, d, spec.separation, rng);
    Matrix X(d, spec.n);
    for (Index j = 0; j < spec.n; ++j) {
      X.col(j) = centers.col(labels[static_cast<std::size_t>(j)]);
      for (Index r = 0; r < d; ++r) X(r, j) += spec.noise_sigma * gauss(rng);
    }
    ds.views.push_back(std::move(X));
  }
  ds.labels = labels;
  return ds;
}

MultiViewDataset generate_hierarchical(const HierarchicalSpec& spec, std::vector<int>* sub_labels) {
  if (spec.subclusters < 1) throw InvalidArgument("subclusters must be >= 1");
  const int leaves = spec.k * spec.subclusters;
  check_synthetic(spec.n, leaves, spec.dims, spec.noise_sigma);
  std::mt19937_64 rng(spec.seed);
  MultiViewDataset ds;
  ds.name = "hierarchical";
  const std::vector<int> leaf = balanced_labels(spec.n, leaves, rng);
  std::vector<int> labels(leaf.size()), children(leaf.size());
  for (std::size_t j = 0; j < leaf.size(); ++j) {
    labels[j] = leaf[j] / spec.subclusters;
    children[j] = leaf[j] % spec.subclusters;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index d : spec.dims) {
    const Matrix parents = simplex_centers(spec.k, d, spec.separation, rng);
    Matrix leaf_centers(d, leaves);
    for (int c = 0; c < spec.k; ++c)
      leaf_centers.middleCols(c * spec.subclusters, spec.subclusters) =
          simplex_centers(spec.subclusters, d, spec.sub_separation, rng).colwise() + parents.col(c);
    Matrix X(d, spec.n);
    for (Index j = 0; j < spec.n; ++j) {
      X.col(j) = leaf_centers.col(leaf[static_cast<std::size_t>(j)]);
      for (Index r = 0; r < d; ++r) X(r, j) += spec.noise_sigma * gauss(rng);
    }
    ds.views.push_back(std::move(X));
  }
  ds.labels = labels;
  if (sub_labels) *sub_labels = children;
  return ds;
}

}  // namespace mvdmf
