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

#include "ifaad/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "ifaad/status_macros.h"

namespace ifaad {

namespace {

std::string Shortest(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::optional<double> ParseDouble(std::string_view text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> Split(std::string_view text, char separator) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t end = text.find(separator, start);
    parts.push_back(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

struct RunOutcome {
  absl::Status status;
  std::vector<int64_t> queried;
};

RunOutcome ExecuteRun(const LabeledDataset& dataset, const ExperimentConfig& config,
                      int32_t run) {
  RunOutcome outcome;
  ForestOptions options;
  options.subsample_size = config.subsample_size;
  options.num_trees = config.num_trees;
  options.scheme = config.arm == Arm::kIfAadLeaf ? WeightScheme::kLeafDepth
                                                 : WeightScheme::kIsolationForest;
  options.seed = config.base_seed + static_cast<uint64_t>(run);
  absl::StatusOr<Forest> forest = BuildForest(dataset.instances, options);
  if (!forest.ok()) {
    outcome.status = forest.status();
    return outcome;
  }

  if (config.arm == Arm::kIfBaseline) {
    absl::StatusOr<std::vector<int64_t>> ranked = BaselineRank(*forest, dataset.instances);
    if (!ranked.ok()) {
      outcome.status = ranked.status();
      return outcome;
    }
    ranked->resize(config.budget);
    outcome.queried = std::move(*ranked);
    return outcome;
  }

  AadConfig aad = config.aad;
  aad.budget = config.budget;
  const LabelOracle oracle = [&dataset](int64_t id) -> absl::StatusOr<Label> {
    return dataset.truth[id];
  };
  absl::StatusOr<LoopResult> result =
      RunFeedbackLoop(*forest, dataset.instances, oracle, aad);
  if (!result.ok()) {
    outcome.status = result.status();
    return outcome;
  }
  for (const QueryRecord& record : result->state.query_history) {
    outcome.queried.push_back(record.id);
  }
  return outcome;
}

}  // namespace

std::string_view ArmName(Arm arm) {
  switch (arm) {
    case Arm::kIfAad:
      return "if-aad";
    case Arm::kIfAadLeaf:
      return "if-aad-leaf";
    case Arm::kIfBaseline:
      return "if-baseline";
  }
  return "unknown";
}

std::optional<Arm> ParseArm(std::string_view name) {
  for (Arm arm : {Arm::kIfAad, Arm::kIfAadLeaf, Arm::kIfBaseline}) {
    if (ArmName(arm) == name) return arm;
  }
  return std::nullopt;
}

absl::Status ExperimentConfig::Validate(size_t dataset_size) const {
  if (budget < 0) return absl::InvalidArgumentError("budget must be non-negative");
  if (static_cast<size_t>(budget) > dataset_size) {
    return absl::InvalidArgumentError(absl::StrCat("budget ", budget,
                                                   " exceeds dataset size ", dataset_size));
  }
  if (num_runs < 1) return absl::InvalidArgumentError("num_runs must be at least 1");
  if (num_trees < 1) return absl::InvalidArgumentError("num_trees must be positive");
  if (subsample_size < 1) return absl::InvalidArgumentError("subsample_size must be positive");
  if (num_threads < 1) return absl::InvalidArgumentError("num_threads must be positive");
  AadConfig aad_check = aad;
  aad_check.budget = budget;
  return aad_check.Validate();
}

void Aggregate(DiscoveryCurve& curve) {
  const auto runs = static_cast<double>(curve.per_run.size());
  curve.mean.assign(curve.budget, 0.0);
  curve.ci_low.assign(curve.budget, 0.0);
  curve.ci_high.assign(curve.budget, 0.0);
  if (curve.per_run.empty()) return;
  for (int32_t i = 0; i < curve.budget; ++i) {
    double sum = 0.0;
    for (const auto& run : curve.per_run) sum += run[i];
    const double mean = sum / runs;
    double squares = 0.0;
    for (const auto& run : curve.per_run) squares += (run[i] - mean) * (run[i] - mean);
    const double se = runs > 1 ? std::sqrt(squares / (runs - 1.0)) / std::sqrt(runs) : 0.0;
    curve.mean[i] = mean;
    curve.ci_low[i] = mean - 1.96 * se;
    curve.ci_high[i] = mean + 1.96 * se;
  }
}

absl::StatusOr<DiscoveryCurve> RunExperiment(const LabeledDataset& dataset,
                                             const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate(dataset.size()));
  if (!dataset.has_truth()) {
    return absl::FailedPreconditionError("experiments need a dataset with ground truth");
  }

  DiscoveryCurve curve;
  curve.arm = std::string(ArmName(config.arm));
  curve.budget = config.budget;
  if (config.budget == 0) {
    curve.per_run.assign(config.num_runs, {});
    Aggregate(curve);
    return curve;
  }

  std::vector<RunOutcome> outcomes(config.num_runs);
  std::atomic<int32_t> next{0};
  auto worker = [&] {
    for (int32_t run = next++; run < config.num_runs; run = next++) {
      outcomes[run] = ExecuteRun(dataset, config, run);
    }
  };
  const int32_t threads = std::min(config.num_threads, config.num_runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
  }

  for (int32_t run = 0; run < config.num_runs; ++run) {
    const RunOutcome& outcome = outcomes[run];
    if (!outcome.status.ok()) {
      return absl::Status(outcome.status.code(),
                          absl::StrCat("run ", run, ": ", outcome.status.message()));
    }
    std::vector<int32_t> cumulative;
    int32_t found = 0;
    for (size_t i = 0; i < outcome.queried.size(); ++i) {
      const int64_t id = outcome.queried[i];
      if (dataset.truth[id] == Label::kAnomaly) ++found;
      cumulative.push_back(found);
      curve.queries.push_back({run, id, dataset.truth[id], static_cast<int32_t>(i + 1)});
    }
    curve.per_run.push_back(std::move(cumulative));
  }
  Aggregate(curve);
  return curve;
}

std::string CurveCsv(const DiscoveryCurve& curve) {
  std::string out = "iteration,mean,ci_low,ci_high";
  for (int32_t r = 0; r < curve.num_runs(); ++r) absl::StrAppend(&out, ",run_", r);
  out += "\n";
  for (int32_t i = 0; i < curve.budget; ++i) {
    absl::StrAppend(&out, i + 1, ",", Shortest(curve.mean[i]), ",",
                    Shortest(curve.ci_low[i]), ",", Shortest(curve.ci_high[i]));
    for (const auto& run : curve.per_run) absl::StrAppend(&out, ",", run[i]);
    out += "\n";
  }
  return out;
}

std::string QueriesCsv(const DiscoveryCurve& curve) {
  std::string out = "run,instance_id,truth,queried_at\n";
  for (const QueryEvent& event : curve.queries) {
    absl::StrAppend(&out, event.run, ",", event.instance_id, ",",
                    std::string(LabelName(event.truth)), ",", event.queried_at, "\n");
  }
  return out;
}

std::string QueriesPath(const std::string& path) {
  constexpr std::string_view kCsv = ".csv";
  if (path.size() >= kCsv.size() && path.ends_with(kCsv)) {
    return absl::StrCat(path.substr(0, path.size() - kCsv.size()), ".queries.csv");
  }
  return absl::StrCat(path, ".queries.csv");
}

absl::Status ExportResults(const DiscoveryCurve& curve, const std::string& path) {
  for (const auto& [target, text] :
       {std::pair{path, CurveCsv(curve)}, std::pair{QueriesPath(path), QueriesCsv(curve)}}) {
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", target));
    out << text;
    if (!out.flush()) return absl::UnavailableError(absl::StrCat("cannot write ", target));
  }
  return absl::OkStatus();
}

absl::StatusOr<DiscoveryCurve> ParseCurveCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : Split(text, '\n')) {
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) return absl::InvalidArgumentError("empty curve file");
  const std::vector<std::string_view> header = Split(lines[0], ',');
  if (header.size() < 4 || header[0] != "iteration" || header[1] != "mean" ||
      header[2] != "ci_low" || header[3] != "ci_high") {
    return absl::InvalidArgumentError("not a discovery curve CSV");
  }
  DiscoveryCurve curve;
  const size_t runs = header.size() - 4;
  curve.per_run.assign(runs, {});
  curve.budget = static_cast<int32_t>(lines.size() - 1);
  for (size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string_view> cells = Split(lines[row], ',');
    if (cells.size() != header.size()) {
      return absl::InvalidArgumentError(absl::StrCat("curve row ", row, " has ",
                                                     cells.size(), " cells"));
    }
    std::vector<double> values;
    for (std::string_view cell : cells) {
      const std::optional<double> value = ParseDouble(cell);
      if (!value) {
        return absl::InvalidArgumentError(
            absl::StrCat("bad number '", std::string(cell), "' in curve row ", row));
      }
      values.push_back(*value);
    }
    if (values[0] != static_cast<double>(row)) {
      return absl::InvalidArgumentError("curve iterations are not consecutive");
    }
    curve.mean.push_back(values[1]);
    curve.ci_low.push_back(values[2]);
    curve.ci_high.push_back(values[3]);
    for (size_t r = 0; r < runs; ++r) {
      curve.per_run[r].push_back(static_cast<int32_t>(values[4 + r]));
    }
  }
  return curve;
}

absl::StatusOr<DiscoveryCurve> LoadCurveCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCurveCsv(buffer.str());
}

absl::StatusOr<ArmComparison> CompareArms(std::span<const DiscoveryCurve> curves) {
  if (curves.empty()) return absl::InvalidArgumentError("no curves to compare");
  for (const DiscoveryCurve& curve : curves) {
    if (curve.budget != curves[0].budget) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mismatched budgets: ", curves[0].arm, " has ", curves[0].budget, ", ",
          curve.arm, " has ", curve.budget));
    }
  }
  size_t reference = 0;
  for (size_t a = 0; a < curves.size(); ++a) {
    if (curves[a].arm == ArmName(Arm::kIfBaseline)) {
      reference = a;
      break;
    }
  }
  const DiscoveryCurve& ref = curves[reference];
  ArmComparison comparison;
  comparison.reference = ref.arm;
  comparison.budget = ref.budget;
  for (const DiscoveryCurve& curve : curves) {
    comparison.arms.push_back(curve.arm);
    std::vector<double> delta(curve.budget);
    for (int32_t i = 0; i < curve.budget; ++i) delta[i] = curve.mean[i] - ref.mean[i];
    comparison.delta.push_back(std::move(delta));
    if (curve.budget == 0) {
      comparison.final_mean.push_back(0.0);
      comparison.final_ci_overlaps.push_back(true);
      continue;
    }
    const int32_t last = curve.budget - 1;
    comparison.final_mean.push_back(curve.mean[last]);
    comparison.final_ci_overlaps.push_back(curve.ci_low[last] <= ref.ci_high[last] &&
                                           ref.ci_low[last] <= curve.ci_high[last]);
  }
  return comparison;
}

std::string ComparisonCsv(const ArmComparison& comparison) {
  std::string out = "iteration";
  for (const std::string& arm : comparison.arms) {
    absl::StrAppend(&out, ",", arm, "-", comparison.reference);
  }
  out += "\n";
  for (int32_t i = 0; i < comparison.budget; ++i) {
    absl::StrAppend(&out, i + 1);
    for (const auto& delta : comparison.delta) absl::StrAppend(&out, ",", Shortest(delta[i]));
    out += "\n";
  }
  return out;
}

}  // namespace ifaad
