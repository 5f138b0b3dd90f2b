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

// Simulated-analyst experiments: every run builds a fresh forest, answers
// queries from ground truth and records how many true anomalies have been
// shown after each query.

#ifndef IFAAD_HARNESS_H_
#define IFAAD_HARNESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ifaad/aad.h"
#include "ifaad/data.h"
#include "ifaad/forest.h"

namespace ifaad {

enum class Arm {
  kIfAad,      // feedback, isolation-forest node scores
  kIfAadLeaf,  // feedback, leaf-depth node scores
  kIfBaseline  // uniform weights, feedback ignored
};

std::string_view ArmName(Arm arm);
std::optional<Arm> ParseArm(std::string_view name);

struct ExperimentConfig {
  Arm arm = Arm::kIfAad;
  int32_t budget = 60;
  int32_t num_runs = 10;
  // Run r uses forest seed base_seed + r.
  uint64_t base_seed = 0;
  int32_t num_trees = 100;
  int32_t subsample_size = 256;
  // aad.budget is replaced by `budget`.
  AadConfig aad;
  // Runs executed concurrently; results do not depend on it.
  int32_t num_threads = 1;

  absl::Status Validate(size_t dataset_size) const;
};

struct QueryEvent {
  int32_t run = 0;
  int64_t instance_id = 0;
  Label truth = Label::kNominal;
  // 1-based query number.
  int32_t queried_at = 0;

  friend bool operator==(const QueryEvent&, const QueryEvent&) = default;
};

struct DiscoveryCurve {
  std::string arm;
  int32_t budget = 0;
  // per_run[r][i]: true anomalies among the first i + 1 queries of run r.
  std::vector<std::vector<int32_t>> per_run;
  std::vector<double> mean;
  // Normal-approximation 95% interval, mean +- 1.96 standard errors.
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<QueryEvent> queries;

  int32_t num_runs() const { return static_cast<int32_t>(per_run.size()); }
};

// Fills mean and CI from per_run.
void Aggregate(DiscoveryCurve& curve);

absl::StatusOr<DiscoveryCurve> RunExperiment(const LabeledDataset& dataset,
                                             const ExperimentConfig& config);

// Writes the curve CSV (iteration, mean, ci_low, ci_high, run_0 ...) to
// `path` and the query records (run, instance_id, truth, queried_at) to
// QueriesPath(path).
absl::Status ExportResults(const DiscoveryCurve& curve, const std::string& path);
std::string QueriesPath(const std::string& path);
std::string CurveCsv(const DiscoveryCurve& curve);
std::string QueriesCsv(const DiscoveryCurve& curve);

// Reads back a curve CSV; `queries` is left empty.
absl::StatusOr<DiscoveryCurve> ParseCurveCsv(std::string_view text);
absl::StatusOr<DiscoveryCurve> LoadCurveCsv(const std::string& path);

struct ArmComparison {
  // Arm whose mean is subtracted: the baseline when present, else the first.
  std::string reference;
  std::vector<std::string> arms;
  int32_t budget = 0;
  // delta[a][i] = mean of arms[a] minus reference mean at query i + 1.
  std::vector<std::vector<double>> delta;
  std::vector<double> final_mean;
  // Whether each arm's final CI overlaps the reference's final CI.
  std::vector<bool> final_ci_overlaps;
};

absl::StatusOr<ArmComparison> CompareArms(std::span<const DiscoveryCurve> curves);

// CSV with one row per query: iteration, then one delta column per arm.
std::string ComparisonCsv(const ArmComparison& comparison);

}  // namespace ifaad

#endif  // IFAAD_HARNESS_H_
