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

// Command-line front end: forest building, baseline ranking, simulated
// analyst loops, multi-run experiments, benchmark preparation and the HTTP
// service. Failures print one JSON line on stderr and exit nonzero.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ifaad/aad.h"
#include "ifaad/data.h"
#include "ifaad/forest.h"
#include "ifaad/harness.h"
#include "ifaad/service.h"
#include "ifaad/status_macros.h"
#include "json.hpp"

namespace ifaad {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Flags {
  std::string dataset = "synthetic";
  std::vector<std::string> arms;
  int32_t budget = 60;
  int32_t runs = 10;
  uint64_t seed = 0;
  double tau = AadConfig{}.tau;
  double c_a = AadConfig{}.c_a;
  double c_xi = AadConfig{}.c_xi;
  int32_t trees = 100;
  int32_t subsample = 256;
  std::string scheme = "isolation-forest";
  std::string out;
  int32_t threads = 1;
  int64_t top = 0;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
  std::string session_dir;
  // prepare
  std::string benchmark;
  std::string raw;
};

std::string CodeName(absl::StatusCode code) {
  std::string name = absl::StatusCodeToString(code);
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return name;
}

int Fail(const absl::Status& status) {
  const json line = {{"error",
                      {{"code", CodeName(status.code())},
                       {"message", std::string(status.message())}}}};
  std::cerr << line.dump() << std::endl;
  return 1;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// "synthetic", "synthetic:N:A" or "synthetic:N:A:SEED"; anything else is a
// canonical CSV path.
absl::StatusOr<LabeledDataset> ResolveDataset(const std::string& spec) {
  if (spec == "synthetic" || spec.starts_with("synthetic:")) {
    int32_t nominal = 500;
    int32_t anomaly = 15;
    uint64_t seed = 0;
    if (spec != "synthetic") {
      std::vector<std::string> parts;
      std::stringstream stream(spec.substr(std::string("synthetic:").size()));
      for (std::string part; std::getline(stream, part, ':');) parts.push_back(part);
      try {
        if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument(spec);
        nominal = std::stoi(parts[0]);
        anomaly = std::stoi(parts[1]);
        if (parts.size() == 3) seed = std::stoull(parts[2]);
      } catch (const std::exception&) {
        return absl::InvalidArgumentError(
            absl::StrCat("bad synthetic spec '", spec, "'; expected synthetic:N:A[:SEED]"));
      }
      if (nominal < 1 || anomaly < 0) {
        return absl::InvalidArgumentError("synthetic counts must be positive");
      }
    }
    return MakeSynthetic2d(nominal, anomaly, seed);
  }
  return LoadCsv(spec, CanonicalSchema());
}

absl::StatusOr<WeightScheme> ResolveScheme(const std::string& name) {
  const std::optional<WeightScheme> scheme = ParseWeightScheme(name);
  if (!scheme) return absl::InvalidArgumentError(absl::StrCat("unknown scheme '", name, "'"));
  return *scheme;
}

absl::StatusOr<ForestOptions> ForestFlags(const Flags& flags) {
  ForestOptions options;
  options.num_trees = flags.trees;
  options.subsample_size = flags.subsample;
  options.seed = flags.seed;
  options.num_threads = flags.threads;
  ASSIGN_OR_RETURN(options.scheme, ResolveScheme(flags.scheme));
  return options;
}

ExperimentConfig ExperimentFlags(const Flags& flags, Arm arm) {
  ExperimentConfig config;
  config.arm = arm;
  config.budget = flags.budget;
  config.num_runs = flags.runs;
  config.base_seed = flags.seed;
  config.num_trees = flags.trees;
  config.subsample_size = flags.subsample;
  config.aad.tau = flags.tau;
  config.aad.c_a = flags.c_a;
  config.aad.c_xi = flags.c_xi;
  config.num_threads = flags.threads;
  return config;
}

absl::StatusOr<std::vector<Arm>> ResolveArms(const std::vector<std::string>& names,
                                             std::vector<Arm> defaults) {
  if (names.empty()) return defaults;
  std::vector<Arm> arms;
  for (const std::string& name : names) {
    const std::optional<Arm> arm = ParseArm(name);
    if (!arm) return absl::InvalidArgumentError(absl::StrCat("unknown arm '", name, "'"));
    arms.push_back(*arm);
  }
  return arms;
}

absl::Status RunBuild(const Flags& flags) {
  ASSIGN_OR_RETURN(const LabeledDataset dataset, ResolveDataset(flags.dataset));
  ASSIGN_OR_RETURN(const ForestOptions options, ForestFlags(flags));
  ASSIGN_OR_RETURN(const Forest forest, BuildForest(dataset.instances, options));
  const std::string bytes = SerializeForest(forest);
  if (!flags.out.empty()) RETURN_IF_ERROR(WriteText(flags.out, bytes));
  const json summary = {{"dataset", dataset.name},
                        {"instances", dataset.size()},
                        {"trees", forest.num_trees()},
                        {"nodes", forest.num_nodes},
                        {"scheme", std::string(WeightSchemeName(options.scheme))},
                        {"seed", options.seed},
                        {"bytes", bytes.size()},
                        {"checksum", absl::StrFormat("%016x", Fnv1a64(bytes))}};
  std::cout << summary.dump() << "\n";
  return absl::OkStatus();
}

absl::Status RunRank(const Flags& flags) {
  ASSIGN_OR_RETURN(const LabeledDataset dataset, ResolveDataset(flags.dataset));
  ASSIGN_OR_RETURN(const ForestOptions options, ForestFlags(flags));
  ASSIGN_OR_RETURN(const Forest forest, BuildForest(dataset.instances, options));
  ASSIGN_OR_RETURN(const std::vector<int64_t> order, BaselineRank(forest, dataset.instances));
  ASSIGN_OR_RETURN(const std::vector<SparseNodeVector> all_z,
                   TraverseAll(forest, dataset.instances));
  const WeightVector uniform = WeightVector::Uniform(forest.num_nodes);
  std::string csv = dataset.has_truth() ? "rank,instance_id,score,truth\n"
                                        : "rank,instance_id,score\n";
  const size_t limit = flags.top > 0 ? std::min<size_t>(flags.top, order.size()) : order.size();
  for (size_t r = 0; r < limit; ++r) {
    const int64_t id = order[r];
    absl::StrAppend(&csv, r + 1, ",", id, ",",
                    absl::StrFormat("%.17g", ScoreUnchecked(all_z[id], uniform.values())));
    if (dataset.has_truth()) absl::StrAppend(&csv, ",", std::string(LabelName(dataset.truth[id])));
    csv += "\n";
  }
  return WriteText(flags.out, csv);
}

absl::Status RunLoop(const Flags& flags) {
  ASSIGN_OR_RETURN(const LabeledDataset dataset, ResolveDataset(flags.dataset));
  ASSIGN_OR_RETURN(const std::vector<Arm> arms, ResolveArms(flags.arms, {Arm::kIfAad}));
  if (arms.size() != 1) return absl::InvalidArgumentError("loop takes a single --arm");
  Flags single = flags;
  single.runs = 1;
  ASSIGN_OR_RETURN(const DiscoveryCurve curve,
                   RunExperiment(dataset, ExperimentFlags(single, arms[0])));
  std::string csv = "iteration,instance_id,truth,anomalies_found\n";
  for (const QueryEvent& event : curve.queries) {
    absl::StrAppend(&csv, event.queried_at, ",", event.instance_id, ",", std::string(LabelName(event.truth)),
                    ",", curve.per_run[0][event.queried_at - 1], "\n");
  }
  return WriteText(flags.out, csv);
}

absl::Status RunExperimentCommand(const Flags& flags) {
  ASSIGN_OR_RETURN(const LabeledDataset dataset, ResolveDataset(flags.dataset));
  ASSIGN_OR_RETURN(const std::vector<Arm> arms,
                   ResolveArms(flags.arms, {Arm::kIfAad, Arm::kIfAadLeaf, Arm::kIfBaseline}));
  std::vector<DiscoveryCurve> curves;
  for (Arm arm : arms) {
    ASSIGN_OR_RETURN(DiscoveryCurve curve, RunExperiment(dataset, ExperimentFlags(flags, arm)));
    curves.push_back(std::move(curve));
  }
  ASSIGN_OR_RETURN(const ArmComparison comparison, CompareArms(curves));
  if (!flags.out.empty()) {
    std::error_code ec;
    fs::create_directories(flags.out, ec);
    if (ec) return absl::UnavailableError(absl::StrCat("cannot create ", flags.out));
    for (const DiscoveryCurve& curve : curves) {
      RETURN_IF_ERROR(ExportResults(curve, (fs::path(flags.out) / (curve.arm + ".csv")).string()));
    }
    RETURN_IF_ERROR(
        WriteText((fs::path(flags.out) / "comparison.csv").string(), ComparisonCsv(comparison)));
  }
  json summary = {{"dataset", dataset.name},
                  {"budget", flags.budget},
                  {"runs", flags.runs},
                  {"reference", comparison.reference},
                  {"arms", json::array()}};
  for (size_t a = 0; a < curves.size(); ++a) {
    const DiscoveryCurve& curve = curves[a];
    const double final_mean = curve.mean.empty() ? 0.0 : curve.mean.back();
    summary["arms"].push_back({{"arm", curve.arm},
                               {"final_mean", final_mean},
                               {"final_ci_low", curve.ci_low.empty() ? 0.0 : curve.ci_low.back()},
                               {"final_ci_high", curve.ci_high.empty() ? 0.0 : curve.ci_high.back()},
                               {"final_delta", comparison.delta[a].empty()
                                                   ? 0.0
                                                   : comparison.delta[a].back()}});
  }
  std::cout << summary.dump() << "\n";
  return absl::OkStatus();
}

absl::Status RunPrepare(const Flags& flags) {
  ASSIGN_OR_RETURN(const BenchmarkSpec spec, FindBenchmark(flags.benchmark));
  ASSIGN_OR_RETURN(const std::string raw, ReadText(flags.raw));
  ASSIGN_OR_RETURN(const LabeledDataset dataset, PrepareBenchmark(spec, raw));
  RETURN_IF_ERROR(VerifyBenchmarkCounts(spec, dataset));
  const std::string out = flags.out.empty() ? spec.name + ".csv" : flags.out;
  RETURN_IF_ERROR(WriteCanonicalCsv(dataset, out));
  RETURN_IF_ERROR(WriteText(fs::path(out).replace_extension(".manifest.json").string(),
                            BenchmarkManifest(spec, dataset)));
  const json summary = {{"benchmark", spec.name},
                        {"out", out},
                        {"total", dataset.size()},
                        {"dims", dataset.num_features()},
                        {"anomalies", dataset.num_anomalies()}};
  std::cout << summary.dump() << "\n";
  return absl::OkStatus();
}

HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

absl::Status RunServe(const Flags& flags) {
  ServiceCore core(ServiceOptions{.data_dir = flags.data_dir,
                                  .session_dir = flags.session_dir,
                                  .num_threads = flags.threads});
  RETURN_IF_ERROR(core.Start());
  HttpServer server(&core);
  ASSIGN_OR_RETURN(const int port, server.Start(flags.host, flags.port));
  std::cout << json{{"listening", absl::StrCat("http://", flags.host, ":", port)}}.dump()
            << std::endl;
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  server.Wait();
  g_server = nullptr;
  return absl::OkStatus();
}

void AddForestFlags(CLI::App* command, Flags& flags) {
  command->add_option("--dataset", flags.dataset,
                      "synthetic, synthetic:N:A[:SEED] or a canonical CSV path");
  command->add_option("--seed", flags.seed, "Forest seed (base seed for multi-run)");
  command->add_option("--trees", flags.trees, "Number of trees");
  command->add_option("--subsample", flags.subsample, "Subsample size per tree");
  command->add_option("--threads", flags.threads, "Worker threads");
}

void AddAadFlags(CLI::App* command, Flags& flags) {
  command->add_option("--arm", flags.arms, "if-aad, if-aad-leaf or if-baseline");
  command->add_option("--budget", flags.budget, "Queries per run");
  command->add_option("--tau", flags.tau, "Quantile anchor fraction in (0, 1)");
  command->add_option("--ca", flags.c_a, "Anomaly hinge weight");
  command->add_option("--cxi", flags.c_xi, "Regularization weight");
}

int Main(int argc, char** argv) {
  CLI::App app("Isolation-forest active anomaly discovery", "ifaad");
  app.require_subcommand(1);
  Flags flags;

  CLI::App* build = app.add_subcommand("build", "Build a forest and report its summary");
  AddForestFlags(build, flags);
  build->add_option("--scheme", flags.scheme, "Node scores: isolation-forest or leaf-depth");
  build->add_option("--out", flags.out, "Write the serialized forest here");

  CLI::App* rank = app.add_subcommand("rank", "Rank instances under uniform weights");
  AddForestFlags(rank, flags);
  rank->add_option("--top", flags.top, "Rows to print; 0 prints all");
  rank->add_option("--out", flags.out, "CSV output path (default stdout)");

  CLI::App* loop = app.add_subcommand("loop", "One simulated-analyst session");
  AddForestFlags(loop, flags);
  AddAadFlags(loop, flags);
  loop->add_option("--out", flags.out, "CSV output path (default stdout)");

  CLI::App* experiment = app.add_subcommand("experiment", "Multi-run discovery curves");
  AddForestFlags(experiment, flags);
  AddAadFlags(experiment, flags);
  experiment->add_option("--runs", flags.runs, "Runs per arm");
  experiment->add_option("--out", flags.out, "Directory for curve and comparison CSVs");

  CLI::App* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--host", flags.host, "Bind address");
  serve->add_option("--port", flags.port, "Port; 0 picks a free one");
  serve->add_option("--data-dir", flags.data_dir, "Uploaded dataset storage");
  serve->add_option("--session-dir", flags.session_dir, "Session file storage");
  serve->add_option("--threads", flags.threads, "Forest build threads");

  CLI::App* prepare = app.add_subcommand("prepare", "Convert a raw benchmark file");
  prepare->add_option("--dataset", flags.benchmark, "Benchmark name")->required();
  prepare->add_option("--raw", flags.raw, "Raw input file")->required();
  prepare->add_option("--out", flags.out, "Canonical CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Fail(absl::InvalidArgumentError(e.what()));
    return 2;
  }

  absl::Status status;
  if (build->parsed()) status = RunBuild(flags);
  if (rank->parsed()) status = RunRank(flags);
  if (loop->parsed()) status = RunLoop(flags);
  if (experiment->parsed()) status = RunExperimentCommand(flags);
  if (serve->parsed()) status = RunServe(flags);
  if (prepare->parsed()) status = RunPrepare(flags);
  return status.ok() ? 0 : Fail(status);
}

}  // namespace
}  // namespace ifaad

int main(int argc, char** argv) { return ifaad::Main(argc, argv); }
