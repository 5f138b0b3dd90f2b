/*
 * Copyright 2026 The ifaad Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IFAAD_DATA_H_
#define IFAAD_DATA_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ifaad/aad.h"
#include "ifaad/forest.h"

namespace ifaad {

// Instances with ground truth. Instance ids equal their row position.
// `truth` is empty for unlabeled tables (e.g. an analyst's upload).
struct LabeledDataset {
  std::string name;
  std::string provenance;
  std::vector<std::string> feature_names;
  std::vector<Instance> instances;
  std::vector<Label> truth;
  // Rows skipped because their class is in neither mapped set.
  int64_t dropped_rows = 0;

  size_t size() const { return instances.size(); }
  size_t num_features() const { return feature_names.size(); }
  size_t num_anomalies() const;
  double anomaly_fraction() const;
  bool has_truth() const { return !truth.empty(); }
};

// Which raw class values count as nominal and which as anomalous.
struct ClassMapping {
  std::set<std::string> nominal_classes;
  std::set<std::string> anomaly_classes;
  std::optional<double> downsample_anomaly_fraction;

  absl::Status Validate() const;
};

// One-hot encoding of a categorical column: one 0/1 column per listed level,
// named "<column>_<level>". Values outside `levels` encode as all zeros.
struct CategoricalEncoding {
  std::string column;
  std::vector<std::string> levels;
};

struct CsvSchema {
  // Empty means the table carries no labels.
  std::string label_column = "label";
  ClassMapping mapping = {{"nominal"}, {"anomaly"}, std::nullopt};
  // ' ' splits on runs of whitespace.
  char delimiter = ',';
  bool has_header = true;
  // Column names for header-less files.
  std::vector<std::string> column_names;
  // When non-empty, only these columns (plus label and categoricals) are
  // used, in this order.
  std::vector<std::string> feature_columns;
  std::vector<std::string> drop_columns;
  std::vector<CategoricalEncoding> categoricals;
};

// The canonical schema written by WriteCanonicalCsv.
CsvSchema CanonicalSchema();

absl::StatusOr<LabeledDataset> ParseCsv(std::string_view text,
                                        const CsvSchema& schema,
                                        std::string name = "dataset");
absl::StatusOr<LabeledDataset> LoadCsv(const std::string& path,
                                       const CsvSchema& schema);

// Feature columns followed by a "label" column holding anomaly/nominal.
std::string CanonicalCsv(const LabeledDataset& dataset);
absl::Status WriteCanonicalCsv(const LabeledDataset& dataset,
                               const std::string& path);

// Keeps a uniformly random subset of the anomalies so that their fraction
// is as close as possible to `target_fraction`. Nominals and row order are
// preserved.
absl::StatusOr<LabeledDataset> DownsampleAnomalies(const LabeledDataset& dataset,
                                                   double target_fraction,
                                                   uint64_t seed);

struct GaussianCluster {
  double center_x;
  double center_y;
  double sigma;
  // Share of the points drawn from this cluster.
  double weight;
};

// Nominal clusters used by MakeSynthetic2d: three dense ones and a smaller
// diffuse one whose fringe looks anomalous to an unsupervised detector.
const std::vector<GaussianCluster>& SyntheticClusters();

// Small loose groups the anomalies are drawn around.
const std::vector<GaussianCluster>& SyntheticAnomalyGroups();

// Nominals from isotropic Gaussian clusters split by weight; anomalies from
// the anomaly groups, each outside 3 sigma of every nominal cluster center.
LabeledDataset MakeSynthetic2d(int32_t num_nominal, int32_t num_anomaly,
                               uint64_t seed);

// Published benchmark preparation: raw UCI-style file in, canonical dataset
// out, with the expected (total, dims, anomalies) triple.
struct BenchmarkSpec {
  std::string name;
  // File the raw text is expected to come from.
  std::string raw_file;
  CsvSchema schema;
  int64_t expected_total = 0;
  int64_t expected_dims = 0;
  int64_t expected_anomalies = 0;
  uint64_t downsample_seed = 0;
};

const std::vector<BenchmarkSpec>& Benchmarks();
absl::StatusOr<BenchmarkSpec> FindBenchmark(std::string_view name);

absl::StatusOr<LabeledDataset> PrepareBenchmark(const BenchmarkSpec& spec,
                                                std::string_view raw_text);

// OK when the dataset's size, dimensionality and anomaly count match.
absl::Status VerifyBenchmarkCounts(const BenchmarkSpec& spec,
                                   const LabeledDataset& dataset);

// Sidecar manifest (JSON): name, mapping, counts and an FNV-1a checksum of
// the canonical CSV.
std::string BenchmarkManifest(const BenchmarkSpec& spec,
                              const LabeledDataset& dataset);

uint64_t Fnv1a64(std::string_view bytes);

}  // namespace ifaad

#endif  // IFAAD_DATA_H_
