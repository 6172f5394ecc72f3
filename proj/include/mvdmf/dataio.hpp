#pragma once

#include "mvdmf/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mvdmf {

// Contents of the `manifest.json` file at the root of a dataset directory.
struct DatasetManifest {
  std::string name;
  std::vector<std::string> view_files;  // relative to the dataset directory
  std::optional<std::string> labels_file;
  std::optional<int> k;

  void validate() const;
};

inline constexpr const char* kManifestFile = "manifest.json";

// Dense matrix text: one row per line, entries separated by commas and/or
// whitespace, no header. Blank lines and lines starting with '#' are skipped.
Matrix read_matrix(const std::filesystem::path& file);
void write_matrix(const std::filesystem::path& file, const Matrix& M);

std::vector<int> read_labels(const std::filesystem::path& file);
void write_labels(const std::filesystem::path& file, const std::vector<int>& labels);

DatasetManifest read_manifest(const std::filesystem::path& dir);

// Loads and validates a dataset directory. Views are stored features x samples.
MultiViewDataset load_dataset(const std::filesystem::path& dir, DatasetManifest* manifest = nullptr);

// Writes view<v>.txt, labels.txt (when labeled) and manifest.json.
void save_dataset(const std::filesystem::path& dir, const MultiViewDataset& ds,
                  std::optional<int> k = std::nullopt);

enum class Normalization {
  kUnitSample,     // every sample column scaled to unit L2 norm
  kFeatureMinMax,  // every feature row mapped onto [0, 1]
};

// Zero columns (or constant rows for min-max) are left unchanged and counted
// in *untouched.
MultiViewDataset normalize_views(const MultiViewDataset& ds,
                                 Normalization mode = Normalization::kUnitSample,
                                 int* untouched = nullptr);

struct SyntheticSpec {
  Index n = 300;
  int k = 3;
  std::vector<Index> dims = {20, 30, 25};  // one entry per view
  double separation = 10.0;                // pairwise center distance
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

// Gaussian clusters with one shared, balanced assignment across views. Per
// view the k centers sit on a regular simplex with edge `separation`,
// randomly rotated; every view draws independent noise.
MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

struct HierarchicalSpec {
  Index n = 300;
  int k = 3;              // super-clusters (the labels)
  int subclusters = 2;    // children per super-cluster
  std::vector<Index> dims = {20, 30, 25};
  double separation = 10.0;      // between super-cluster centers
  double sub_separation = 4.0;   // between children of one super-cluster
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

// Two-level planted structure. Labels are the super-clusters; the child
// index of every sample is written to *sub_labels when given.
MultiViewDataset generate_hierarchical(const HierarchicalSpec& spec,
                                       std::vector<int>* sub_labels = nullptr);

}  // namespace mvdmf
