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

#include "ifaad/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ifaad/random.h"
#include "ifaad/status_macros.h"
#include "json.hpp"

namespace ifaad {

namespace {

std::string_view Trim(std::string_view text) {
  while (!text.empty() && absl::ascii_isspace(text.front())) text.remove_prefix(1);
  while (!text.empty() && absl::ascii_isspace(text.back())) text.remove_suffix(1);
  return text;
}

std::vector<std::string> SplitRecord(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  if (delimiter == ' ') {
    size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && absl::ascii_isspace(line[pos])) ++pos;
      if (pos == line.size()) break;
      const size_t start = pos;
      while (pos < line.size() && !absl::ascii_isspace(line[pos])) ++pos;
      fields.emplace_back(line.substr(start, pos - start));
    }
    return fields;
  }
  // Quoted fields may contain the delimiter; "" is an escaped quote.
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.emplace_back(Trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.emplace_back(Trim(field));
  return fields;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool IsBlank(std::string_view line) {
  return Trim(line).empty();
}

// A line of delimiters only (spreadsheet exports pad with these).
bool IsEmptyRecord(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(),
                     [](const std::string& f) { return f.empty(); });
}

std::optional<double> ParseNumber(std::string_view text) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string FormatNumber(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

int FindColumn(const std::vector<std::string>& names, std::string_view name) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

size_t LabeledDataset::num_anomalies() const {
  return static_cast<size_t>(std::count(truth.begin(), truth.end(), Label::kAnomaly));
}

double LabeledDataset::anomaly_fraction() const {
  if (truth.empty()) return 0.0;
  return static_cast<double>(num_anomalies()) / static_cast<double>(truth.size());
}

absl::Status ClassMapping::Validate() const {
  if (nominal_classes.empty() || anomaly_classes.empty()) {
    return absl::InvalidArgumentError("class mapping needs nominal and anomaly classes");
  }
  for (const std::string& c : nominal_classes) {
    if (anomaly_classes.contains(c)) {
      return absl::InvalidArgumentError(
          absl::StrCat("class '", c, "' is mapped to both nominal and anomaly"));
    }
  }
  if (downsample_anomaly_fraction &&
      !(*downsample_anomaly_fraction > 0.0 && *downsample_anomaly_fraction < 1.0)) {
    return absl::InvalidArgumentError("downsample fraction must be in (0, 1)");
  }
  return absl::OkStatus();
}

CsvSchema CanonicalSchema() { return CsvSchema{}; }

absl::StatusOr<LabeledDataset> ParseCsv(std::string_view text,
                                        const CsvSchema& schema,
                                        std::string name) {
  const bool labeled = !schema.label_column.empty();
  if (labeled) RETURN_IF_ERROR(schema.mapping.Validate());

  const std::vector<std::string_view> lines = SplitLines(text);
  size_t line_index = 0;
  auto skip_blank = [&] {
    while (line_index < lines.size() && IsBlank(lines[line_index])) ++line_index;
  };

  std::vector<std::string> columns = schema.column_names;
  if (schema.has_header) {
    skip_blank();
    if (line_index == lines.size()) return absl::InvalidArgumentError("empty dataset");
    columns = SplitRecord(lines[line_index++], schema.delimiter);
  }
  if (columns.empty()) return absl::InvalidArgumentError("no column names");

  int label_index = -1;
  if (labeled) {
    label_index = FindColumn(columns, schema.label_column);
    if (label_index < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing label column '", schema.label_column, "'"));
    }
  }

  // Resolve which raw columns become numeric features, and in what order.
  struct Categorical {
    int column;
    std::vector<std::string> levels;
  };
  std::vector<Categorical> categoricals;
  std::vector<int> numeric;
  LabeledDataset dataset;
  dataset.name = std::move(name);

  std::vector<std::string> wanted = schema.feature_columns;
  if (wanted.empty()) {
    for (const std::string& column : columns) {
      if (column == schema.label_column) continue;
      if (std::find(schema.drop_columns.begin(), schema.drop_columns.end(), column) !=
          schema.drop_columns.end()) {
        continue;
      }
      wanted.push_back(column);
    }
  }
  for (const std::string& column : wanted) {
    const int index = FindColumn(columns, column);
    if (index < 0) {
      return absl::InvalidArgumentError(absl::StrCat("missing column '", column, "'"));
    }
    const auto encoding =
        std::find_if(schema.categoricals.begin(), schema.categoricals.end(),
                     [&](const CategoricalEncoding& e) { return e.column == column; });
    if (encoding != schema.categoricals.end()) {
      categoricals.push_back({index, encoding->levels});
      for (const std::string& level : encoding->levels) {
        dataset.feature_names.push_back(absl::StrCat(column, "_", level));
      }
    } else {
      numeric.push_back(index);
      dataset.feature_names.push_back(column);
    }
  }
  if (dataset.feature_names.empty()) {
    return absl::InvalidArgumentError("no feature columns");
  }

  // Features are emitted in `wanted` order; remember where each comes from.
  struct Source {
    bool categorical;
    int index;  // into numeric or categoricals
  };
  std::vector<Source> sources;
  {
    size_t n = 0;
    size_t c = 0;
    for (const std::string& column : wanted) {
      const bool is_cat = c < categoricals.size() &&
                          columns[categoricals[c].column] == column;
      sources.push_back({is_cat, static_cast<int>(is_cat ? c++ : n++)});
    }
  }

  for (; line_index < lines.size(); ++line_index) {
    if (IsBlank(lines[line_index])) continue;
    const std::vector<std::string> fields = SplitRecord(lines[line_index], schema.delimiter);
    if (IsEmptyRecord(fields)) continue;
    const size_t row_number = line_index + 1;
    if (fields.size() != columns.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", row_number, ": expected ", columns.size(), " fields, got ",
          fields.size()));
    }

    Label label = Label::kNominal;
    if (labeled) {
      const std::string& raw = fields[label_index];
      if (schema.mapping.anomaly_classes.contains(raw)) {
        label = Label::kAnomaly;
      } else if (schema.mapping.nominal_classes.contains(raw)) {
        label = Label::kNominal;
      } else {
        ++dataset.dropped_rows;
        continue;
      }
    }

    Instance instance;
    instance.id = static_cast<int64_t>(dataset.instances.size());
    instance.features.reserve(dataset.feature_names.size());
    for (const Source& source : sources) {
      if (source.categorical) {
        const Categorical& cat = categoricals[source.index];
        for (const std::string& level : cat.levels) {
          instance.features.push_back(fields[cat.column] == level ? 1.0 : 0.0);
        }
        continue;
      }
      const int column = numeric[source.index];
      const std::optional<double> value = ParseNumber(fields[column]);
      if (!value) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", row_number, ", column '", columns[column],
            "': non-numeric feature cell '", fields[column], "'"));
      }
      if (!std::isfinite(*value)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", row_number, ", column '", columns[column], "': non-finite input"));
      }
      instance.features.push_back(*value);
    }
    dataset.instances.push_back(std::move(instance));
    if (labeled) dataset.truth.push_back(label);
  }
  if (dataset.instances.empty()) return absl::InvalidArgumentError("empty dataset");
  return dataset;
}

absl::StatusOr<LabeledDataset> LoadCsv(const std::string& path,
                                       const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ASSIGN_OR_RETURN(LabeledDataset dataset, ParseCsv(buffer.str(), schema, path));
  dataset.provenance = absl::StrCat("csv:", path);
  return dataset;
}

std::string CanonicalCsv(const LabeledDataset& dataset) {
  std::string out = absl::StrJoin(dataset.feature_names, ",");
  if (dataset.has_truth()) absl::StrAppend(&out, ",label");
  out.push_back('\n');
  for (size_t i = 0; i < dataset.instances.size(); ++i) {
    const Instance& instance = dataset.instances[i];
    for (size_t f = 0; f < instance.features.size(); ++f) {
      if (f > 0) out.push_back(',');
      out += FormatNumber(instance.features[f]);
    }
    if (dataset.has_truth()) absl::StrAppend(&out, ",", std::string(LabelName(dataset.truth[i])));
    out.push_back('\n');
  }
  return out;
}

absl::Status WriteCanonicalCsv(const LabeledDataset& dataset,
                               const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << CanonicalCsv(dataset);
  if (!out.flush()) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<LabeledDataset> DownsampleAnomalies(const LabeledDataset& dataset,
                                                   double target_fraction,
                                                   uint64_t seed) {
  if (!dataset.has_truth()) {
    return absl::InvalidArgumentError("dataset has no ground truth");
  }
  const double current = dataset.anomaly_fraction();
  if (!(target_fraction > 0.0) || target_fraction >= current) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target anomaly fraction ", target_fraction,
        " must be in (0, current fraction ", current, ")"));
  }
  std::vector<size_t> anomalies;
  for (size_t i = 0; i < dataset.truth.size(); ++i) {
    if (dataset.truth[i] == Label::kAnomaly) anomalies.push_back(i);
  }
  const double nominals = static_cast<double>(dataset.size() - anomalies.size());
  // k / (nominals + k) closest to the target, i.e. k = round(f n / (1 - f)).
  auto keep = static_cast<size_t>(
      std::llround(target_fraction * nominals / (1.0 - target_fraction)));
  keep = std::min(keep, anomalies.size());

  RandomEngine rng = MakeEngine(seed, 0);
  for (size_t i = 0; i < keep; ++i) {
    const size_t j = i + UniformIndex(rng, anomalies.size() - i);
    std::swap(anomalies[i], anomalies[j]);
  }
  std::vector<bool> kept(dataset.size(), true);
  for (size_t i = keep; i < anomalies.size(); ++i) kept[anomalies[i]] = false;

  LabeledDataset out;
  out.name = dataset.name;
  out.provenance = absl::StrCat(dataset.provenance, "|downsample(", target_fraction,
                                ",seed=", seed, ")");
  out.feature_names = dataset.feature_names;
  out.dropped_rows = dataset.dropped_rows;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (!kept[i]) continue;
    Instance instance = dataset.instances[i];
    instance.id = static_cast<int64_t>(out.instances.size());
    out.instances.push_back(std::move(instance));
    out.truth.push_back(dataset.truth[i]);
  }
  return out;
}

const std::vector<GaussianCluster>& SyntheticClusters() {
  static const auto* clusters = new std::vector<GaussianCluster>{
      {0.0, 0.0, 1.0, 3.0},
      {7.0, 1.0, 0.8, 3.0},
      {3.0, 7.0, 1.2, 3.0},
      {12.0, 8.0, 2.0, 1.0},
  };
  return *clusters;
}

const std::vector<GaussianCluster>& SyntheticAnomalyGroups() {
  static const auto* groups = new std::vector<GaussianCluster>{
      {-4.0, 6.0, 0.5, 1.0},
      {10.0, -4.0, 0.5, 1.0},
      {14.0, 2.0, 0.5, 1.0},
  };
  return *groups;
}

LabeledDataset MakeSynthetic2d(int32_t num_nominal, int32_t num_anomaly,
                               uint64_t seed) {
  const std::vector<GaussianCluster>& clusters = SyntheticClusters();
  const std::vector<GaussianCluster>& groups = SyntheticAnomalyGroups();
  RandomEngine rng = MakeEngine(seed, 0);

  LabeledDataset dataset;
  dataset.name = "synthetic";
  dataset.provenance =
      absl::StrCat("synthetic:", num_nominal, ":", num_anomaly, ":seed=", seed);
  dataset.feature_names = {"x", "y"};

  auto add = [&](double x, double y, Label label) {
    Instance instance;
    instance.id = static_cast<int64_t>(dataset.instances.size());
    instance.features = {x, y};
    dataset.instances.push_back(std::move(instance));
    dataset.truth.push_back(label);
  };

  double total_weight = 0.0;
  for (const GaussianCluster& c : clusters) total_weight += c.weight;
  int32_t made = 0;
  for (size_t k = 0; k < clusters.size(); ++k) {
    const GaussianCluster& c = clusters[k];
    const int32_t count =
        k + 1 == clusters.size()
            ? num_nominal - made
            : std::min(num_nominal - made,
                       static_cast<int32_t>(std::lround(num_nominal * c.weight / total_weight)));
    for (int32_t i = 0; i < count; ++i) {
      const double x = c.center_x + c.sigma * StandardNormal(rng);
      const double y = c.center_y + c.sigma * StandardNormal(rng);
      add(x, y, Label::kNominal);
    }
    made += count;
  }

  // Anomalies are dealt round-robin to the groups and redrawn whenever they
  // land within 3 sigma of a nominal cluster center.
  for (int32_t i = 0; i < num_anomaly;) {
    const GaussianCluster& g = groups[i % groups.size()];
    const double x = g.center_x + g.sigma * StandardNormal(rng);
    const double y = g.center_y + g.sigma * StandardNormal(rng);
    const bool near = std::any_of(clusters.begin(), clusters.end(),
                                  [&](const GaussianCluster& c) {
                                    return std::hypot(x - c.center_x, y - c.center_y) <=
                                           3.0 * c.sigma;
                                  });
    if (near) continue;
    add(x, y, Label::kAnomaly);
    ++i;
  }
  return dataset;
}

const std::vector<BenchmarkSpec>& Benchmarks() {
  static const auto* specs = [] {
    auto* out = new std::vector<BenchmarkSpec>;

    {
      BenchmarkSpec spec;
      spec.name = "abalone";
      spec.raw_file = "abalone.data";
      spec.schema.has_header = false;
      spec.schema.column_names = {"sex",           "length",         "diameter",
                                  "height",        "whole_weight",   "shucked_weight",
                                  "viscera_weight", "shell_weight",  "rings"};
      spec.schema.label_column = "rings";
      // Sex as two indicators (infant is the reference level) plus seven
      // measurements gives 9 dims.
      spec.schema.categoricals = {{"sex", {"M", "F"}}};
      spec.schema.mapping = {{"8", "9", "10"}, {"3", "21"}, std::nullopt};
      spec.expected_total = 1920;
      spec.expected_dims = 9;
      spec.expected_anomalies = 29;
      out->push_back(std::move(spec));
    }
    {
      BenchmarkSpec spec;
      spec.name = "ann-thyroid-1v3";
      spec.raw_file = "ann-test.data";
      spec.schema.has_header = false;
      spec.schema.delimiter = ' ';
      for (int i = 1; i <= 21; ++i) spec.schema.column_names.push_back(absl::StrCat("a", i));
      spec.schema.column_names.push_back("class");
      spec.schema.label_column = "class";
      spec.schema.mapping = {{"3"}, {"1"}, std::nullopt};
      spec.expected_total = 3251;
      spec.expected_dims = 21;
      spec.expected_anomalies = 73;
      out->push_back(std::move(spec));
    }
    {
      BenchmarkSpec spec;
      spec.name = "cardiotocography";
      // "Raw Data" sheet of CTG.xls exported as CSV.
      spec.raw_file = "CTG.csv";
      spec.schema.label_column = "NSP";
      spec.schema.feature_columns = {"LBE",   "LB",    "AC",     "FM",       "UC",
                                     "ASTV",  "MSTV",  "ALTV",   "MLTV",     "DL",
                                     "DS",    "DP",    "Width",  "Min",      "Max",
                                     "Nmax",  "Nzeros", "Mode",  "Mean",     "Median",
                                     "Variance", "Tendency"};
      spec.schema.mapping = {{"1"}, {"3"}, 0.0265};
      spec.expected_total = 1700;
      spec.expected_dims = 22;
      spec.expected_anomalies = 45;
      spec.downsample_seed = 1;
      out->push_back(std::move(spec));
    }
    {
      BenchmarkSpec spec;
      spec.name = "covtype";
      spec.raw_file = "covtype.data";
      spec.schema.has_header = false;
      for (int i = 1; i <= 54; ++i) spec.schema.column_names.push_back(absl::StrCat("f", i));
      spec.schema.column_names.push_back("cover_type");
      spec.schema.label_column = "cover_type";
      spec.schema.mapping = {{"2"}, {"4"}, std::nullopt};
      spec.expected_total = 286048;
      spec.expected_dims = 54;
      spec.expected_anomalies = 2747;
      out->push_back(std::move(spec));
    }
    {
      BenchmarkSpec spec;
      spec.name = "mammography";
      spec.raw_file = "mammography.csv";
      spec.schema.label_column = "class";
      spec.schema.mapping = {{"-1", "'-1'"}, {"1", "+1", "'1'"}, std::nullopt};
      spec.expected_total = 11183;
      spec.expected_dims = 6;
      spec.expected_anomalies = 260;
      out->push_back(std::move(spec));
    }
    {
      BenchmarkSpec spec;
      spec.name = "shuttle";
      spec.raw_file = "shuttle.tst";
      spec.schema.has_header = false;
      spec.schema.delimiter = ' ';
      for (int i = 1; i <= 9; ++i) spec.schema.column_names.push_back(absl::StrCat("a", i));
      spec.schema.column_names.push_back("class");
      spec.schema.label_column = "class";
      spec.schema.mapping = {{"1"}, {"2", "3", "5", "6", "7"}, std::nullopt};
      spec.expected_total = 12345;
      spec.expected_dims = 9;
      spec.expected_anomalies = 867;
      out->push_back(std::move(spec));
    }
    {
      BenchmarkSpec spec;
      spec.name = "yeast";
      spec.raw_file = "yeast.data";
      spec.schema.has_header = false;
      spec.schema.delimiter = ' ';
      spec.schema.column_names = {"sequence", "mcg", "gvh", "alm", "mit",
                                  "erl",      "pox", "vac", "nuc", "class"};
      spec.schema.label_column = "class";
      spec.schema.drop_columns = {"sequence"};
      spec.schema.mapping = {{"CYT", "NUC", "MIT"}, {"ERL", "POX", "VAC"}, std::nullopt};
      spec.expected_total = 1191;
      spec.expected_dims = 8;
      spec.expected_anomalies = 55;
      out->push_back(std::move(spec));
    }
    return out;
  }();
  return *specs;
}

absl::StatusOr<BenchmarkSpec> FindBenchmark(std::string_view name) {
  for (const BenchmarkSpec& spec : Benchmarks()) {
    if (spec.name == name) return spec;
  }
  return absl::NotFoundError(absl::StrCat("unknown benchmark '", std::string(name), "'"));
}

absl::StatusOr<LabeledDataset> PrepareBenchmark(const BenchmarkSpec& spec,
                                                std::string_view raw_text) {
  ASSIGN_OR_RETURN(LabeledDataset dataset, ParseCsv(raw_text, spec.schema, spec.name));
  dataset.provenance = absl::StrCat("benchmark:", spec.name, ":", spec.raw_file);
  if (spec.schema.mapping.downsample_anomaly_fraction) {
    ASSIGN_OR_RETURN(dataset,
                     DownsampleAnomalies(dataset,
                                         *spec.schema.mapping.downsample_anomaly_fraction,
                                         spec.downsample_seed));
  }
  return dataset;
}

absl::Status VerifyBenchmarkCounts(const BenchmarkSpec& spec,
                                   const LabeledDataset& dataset) {
  const auto total = static_cast<int64_t>(dataset.size());
  const auto dims = static_cast<int64_t>(dataset.num_features());
  const auto anomalies = static_cast<int64_t>(dataset.num_anomalies());
  if (total != spec.expected_total || dims != spec.expected_dims ||
      anomalies != spec.expected_anomalies) {
    return absl::FailedPreconditionError(absl::StrCat(
        spec.name, ": got (", total, ", ", dims, ", ", anomalies, "), expected (",
        spec.expected_total, ", ", spec.expected_dims, ", ", spec.expected_anomalies,
        ")"));
  }
  return absl::OkStatus();
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string BenchmarkManifest(const BenchmarkSpec& spec,
                              const LabeledDataset& dataset) {
  nlohmann::json mapping = {
      {"label_column", spec.schema.label_column},
      {"nominal_classes", spec.schema.mapping.nominal_classes},
      {"anomaly_classes", spec.schema.mapping.anomaly_classes},
  };
  if (spec.schema.mapping.downsample_anomaly_fraction) {
    mapping["downsample_anomaly_fraction"] = *spec.schema.mapping.downsample_anomaly_fraction;
    mapping["downsample_seed"] = spec.downsample_seed;
  }
  char checksum[17];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(CanonicalCsv(dataset))));
  const nlohmann::json doc = {
      {"name", spec.name},
      {"raw_file", spec.raw_file},
      {"mapping", mapping},
      {"feature_names", dataset.feature_names},
      {"counts",
       {{"total", dataset.size()},
        {"dims", dataset.num_features()},
        {"anomalies", dataset.num_anomalies()},
        {"dropped_rows", dataset.dropped_rows}}},
      {"checksum_fnv1a64", checksum},
  };
  return doc.dump(2) + "\n";
}

}  // namespace ifaad
