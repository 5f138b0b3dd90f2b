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

#include "ifaad/service.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "httplib.h"
#include "ifaad/aad.h"
#include "ifaad/data.h"
#include "ifaad/forest.h"
#include "ifaad/session_file.h"
#include "ifaad/status_macros.h"
#include "json.hpp"

namespace ifaad {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr char kSyntheticId[] = "synthetic";

int64_t NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  out << text;
  if (!out.flush()) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<json> ParseBody(std::string_view body) {
  try {
    json doc = json::parse(body.empty() ? std::string_view("{}") : body);
    if (!doc.is_object()) return absl::InvalidArgumentError("request body must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    return absl::InvalidArgumentError(absl::StrCat("request body is not valid JSON: ", e.what()));
  }
}

// Lower-case slug of a dataset name, for use in ids and file names.
std::string Slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "dataset" : out.substr(0, 40);
}

struct DatasetEntry {
  std::string id;
  std::string label_column;
  std::shared_ptr<const LabeledDataset> data;
};

struct ForestBundle {
  Forest forest;
  std::vector<SparseNodeVector> all_z;
};

struct Session {
  std::mutex mu;
  std::string id;
  std::string dataset_id;
  std::shared_ptr<const LabeledDataset> dataset;
  std::shared_ptr<const ForestBundle> bundle;
  ForestOptions forest_options;
  AadConfig config;
  std::optional<FeedbackLearner> learner;
  std::optional<int64_t> pending;
  int64_t created_at_ms = 0;
  int64_t updated_at_ms = 0;
};

absl::StatusOr<std::optional<int64_t>> PendingQuery(const FeedbackLearner& learner) {
  if (learner.exhausted()) return std::optional<int64_t>();
  ASSIGN_OR_RETURN(const int64_t id, learner.NextQuery());
  return std::optional<int64_t>(id);
}

int32_t AnomaliesFound(const FeedbackState& state) {
  return static_cast<int32_t>(state.labeled.anomalies.size());
}

json NextPayload(const Session& session) {
  const FeedbackState& state = session.learner->state();
  const int64_t id = *session.pending;
  json features = json::array();
  const Instance& instance = session.dataset->instances[id];
  for (size_t f = 0; f < instance.features.size(); ++f) {
    features.push_back({{"name", session.dataset->feature_names[f]},
                        {"value", instance.features[f]}});
  }
  return {
      {"session_id", session.id},
      {"instance_id", id},
      {"features", std::move(features)},
      {"score", ScoreUnchecked(session.bundle->all_z[id], state.weights.values())},
      {"iteration", state.iteration},
      {"budget", session.config.budget},
      {"budget_remaining", session.config.budget - state.iteration},
  };
}

std::vector<int32_t> Curve(const FeedbackState& state) {
  std::vector<int32_t> curve;
  int32_t found = 0;
  for (const QueryRecord& record : state.query_history) {
    if (record.label == Label::kAnomaly) ++found;
    curve.push_back(found);
  }
  return curve;
}

SessionSnapshot Snapshot(const Session& session, const FeedbackLearner& learner,
                         int64_t updated_at_ms) {
  SessionSnapshot snapshot;
  snapshot.session_id = session.id;
  snapshot.dataset = session.dataset_id;
  snapshot.config = session.config;
  snapshot.forest = session.forest_options;
  snapshot.query_history = learner.state().query_history;
  snapshot.weights = learner.state().weights;
  snapshot.created_at_ms = session.created_at_ms;
  snapshot.updated_at_ms = updated_at_ms;
  return snapshot;
}

// Caller holds session.mu.
json StateJson(const Session& session) {
  const FeedbackState& state = session.learner->state();
  json history = json::array();
  for (size_t i = 0; i < state.query_history.size(); ++i) {
    history.push_back({{"iteration", i + 1},
                       {"instance_id", state.query_history[i].id},
                       {"label", LabelName(state.query_history[i].label)}});
  }
  return {
      {"session_id", session.id},
      {"dataset", session.dataset_id},
      {"status", session.pending ? "active" : "exhausted"},
      {"iteration", state.iteration},
      {"budget", session.config.budget},
      {"budget_remaining", session.config.budget - state.iteration},
      {"anomalies_found", AnomaliesFound(state)},
      {"pending_instance_id", session.pending ? json(*session.pending) : json(nullptr)},
      {"history", std::move(history)},
      {"curve", Curve(state)},
      {"weight_norm", state.weights.Norm()},
      {"feature_names", session.dataset->feature_names},
      {"config",
       {{"tau", session.config.tau},
        {"c_a", session.config.c_a},
        {"c_xi", session.config.c_xi},
        {"learning_rate", session.config.learning_rate},
        {"max_steps", session.config.max_steps},
        {"budget", session.config.budget}}},
      {"forest",
       {{"seed", session.forest_options.seed},
        {"scheme", WeightSchemeName(session.forest_options.scheme)},
        {"trees", session.forest_options.num_trees},
        {"subsample", session.forest_options.subsample_size}}},
      {"created_at_ms", session.created_at_ms},
      {"updated_at_ms", session.updated_at_ms},
  };
}

template <typename T>
absl::Status ReadField(const json& doc, const char* key, T& out) {
  if (!doc.contains(key) || doc.at(key).is_null()) return absl::OkStatus();
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    return absl::InvalidArgumentError(absl::StrCat("field '", key, "' has the wrong type"));
  }
  return absl::OkStatus();
}

}  // namespace

struct ServiceCore::Impl {
  ServiceOptions options;

  std::shared_mutex datasets_mu;
  std::map<std::string, DatasetEntry> datasets;

  std::mutex forests_mu;
  std::map<std::string, std::shared_ptr<const ForestBundle>> forests;

  std::shared_mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  std::mutex id_mu;
  std::mt19937_64 id_rng{std::random_device{}()};

  std::string NewSessionId() {
    std::lock_guard lock(id_mu);
    return absl::StrFormat("s-%016x", id_rng());
  }

  absl::StatusOr<DatasetEntry> FindDataset(const std::string& id) {
    std::shared_lock lock(datasets_mu);
    const auto it = datasets.find(id);
    if (it == datasets.end()) {
      return absl::NotFoundError(absl::StrCat("unknown dataset '", id, "'"));
    }
    return it->second;
  }

  absl::StatusOr<std::shared_ptr<Session>> FindSession(std::string_view id) {
    std::shared_lock lock(sessions_mu);
    const auto it = sessions.find(std::string(id));
    if (it == sessions.end()) {
      return absl::NotFoundError(absl::StrCat("unknown session '", std::string(id), "'"));
    }
    return it->second;
  }

  // Forests are immutable, so sessions with equal build parameters share one.
  absl::StatusOr<std::shared_ptr<const ForestBundle>> GetForest(
      const DatasetEntry& dataset, const ForestOptions& forest_options) {
    const std::string key = absl::StrCat(
        dataset.id, "|", forest_options.seed, "|", std::string(WeightSchemeName(forest_options.scheme)),
        "|", forest_options.num_trees, "|", forest_options.subsample_size);
    std::lock_guard lock(forests_mu);
    if (const auto it = forests.find(key); it != forests.end()) return it->second;
    auto bundle = std::make_shared<ForestBundle>();
    ForestOptions build = forest_options;
    build.num_threads = options.num_threads;
    ASSIGN_OR_RETURN(bundle->forest, BuildForest(dataset.data->instances, build));
    ASSIGN_OR_RETURN(bundle->all_z, TraverseAll(bundle->forest, dataset.data->instances));
    forests[key] = bundle;
    return bundle;
  }

  absl::Status Persist(const SessionSnapshot& snapshot) {
    if (options.session_dir.empty()) return absl::OkStatus();
    return WriteSessionFile((fs::path(options.session_dir) / (snapshot.session_id + ".json")).string(),
                            snapshot);
  }

  absl::Status AddDataset(DatasetEntry entry) {
    std::unique_lock lock(datasets_mu);
    datasets[entry.id] = std::move(entry);
    return absl::OkStatus();
  }

  absl::Status ResumeSession(const SessionSnapshot& snapshot) {
    ASSIGN_OR_RETURN(const DatasetEntry dataset, FindDataset(snapshot.dataset));
    auto session = std::make_shared<Session>();
    session->id = snapshot.session_id;
    session->dataset_id = snapshot.dataset;
    session->dataset = dataset.data;
    session->forest_options = snapshot.forest;
    session->config = snapshot.config;
    session->created_at_ms = snapshot.created_at_ms;
    session->updated_at_ms = snapshot.updated_at_ms;
    ASSIGN_OR_RETURN(session->bundle, GetForest(dataset, snapshot.forest));
    ASSIGN_OR_RETURN(FeedbackLearner learner,
                     FeedbackLearner::Resume(session->bundle->all_z, snapshot.config,
                                             snapshot.query_history, snapshot.weights));
    ASSIGN_OR_RETURN(session->pending, PendingQuery(learner));
    session->learner.emplace(std::move(learner));
    std::unique_lock lock(sessions_mu);
    sessions[session->id] = std::move(session);
    return absl::OkStatus();
  }
};

ServiceCore::ServiceCore(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
}

ServiceCore::~ServiceCore() = default;

absl::Status ServiceCore::Start() {
  auto synthetic = std::make_shared<LabeledDataset>(MakeSynthetic2d(500, 15, 0));
  RETURN_IF_ERROR(impl_->AddDataset({kSyntheticId, "label", std::move(synthetic)}));

  std::error_code ec;
  for (const std::string& dir : {impl_->options.data_dir, impl_->options.session_dir}) {
    if (dir.empty()) continue;
    fs::create_directories(dir, ec);
    if (ec) return absl::UnavailableError(absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }

  if (!impl_->options.data_dir.empty()) {
    for (const auto& entry : fs::directory_iterator(impl_->options.data_dir)) {
      const std::string file = entry.path().filename().string();
      if (!file.ends_with(".meta.json")) continue;
      const std::string id = file.substr(0, file.size() - std::string(".meta.json").size());
      try {
        const json meta = json::parse(ReadFile(entry.path()));
        const std::string csv = ReadFile(fs::path(impl_->options.data_dir) / (id + ".csv"));
        CsvSchema schema;
        schema.label_column = meta.at("label_column").get<std::string>();
        ASSIGN_OR_RETURN(LabeledDataset data,
                         ParseCsv(csv, schema, meta.at("name").get<std::string>()));
        data.provenance = absl::StrCat("upload:", id);
        RETURN_IF_ERROR(impl_->AddDataset(
            {id, schema.label_column, std::make_shared<LabeledDataset>(std::move(data))}));
      } catch (const json::exception& e) {
        return absl::DataLossError(absl::StrCat("bad dataset metadata ", file, ": ", e.what()));
      }
    }
  }

  if (!impl_->options.session_dir.empty()) {
    for (const auto& entry : fs::directory_iterator(impl_->options.session_dir)) {
      if (entry.path().extension() != ".json") continue;
      absl::StatusOr<SessionSnapshot> snapshot = ReadSessionFile(entry.path().string());
      absl::Status status =
          snapshot.ok() ? impl_->ResumeSession(*snapshot) : snapshot.status();
      if (!status.ok()) {
        std::fprintf(stderr, "skipping session file %s: %s\n", entry.path().c_str(),
                     status.ToString().c_str());
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ServiceCore::RegisterDataset(std::string_view name,
                                                         std::string_view csv_text,
                                                         std::string_view label_column) {
  if (name.empty()) return absl::InvalidArgumentError("dataset name is required");
  CsvSchema schema;
  schema.label_column = std::string(label_column);
  ASSIGN_OR_RETURN(LabeledDataset data, ParseCsv(csv_text, schema, std::string(name)));
  const std::string id =
      absl::StrFormat("%s-%08x", Slug(name), Fnv1a64(csv_text) & 0xffffffffULL);
  data.provenance = absl::StrCat("upload:", id);

  if (!impl_->options.data_dir.empty()) {
    const fs::path dir(impl_->options.data_dir);
    RETURN_IF_ERROR(WriteFile(dir / (id + ".csv"), csv_text));
    const json meta = {{"name", std::string(name)}, {"label_column", std::string(label_column)}};
    RETURN_IF_ERROR(WriteFile(dir / (id + ".meta.json"), meta.dump(1)));
  }

  json response = {
      {"dataset_id", id},
      {"name", data.name},
      {"instances", data.size()},
      {"features", data.num_features()},
      {"feature_names", data.feature_names},
      {"has_truth", data.has_truth()},
      {"dropped_rows", data.dropped_rows},
  };
  if (data.has_truth()) response["anomalies"] = data.num_anomalies();
  RETURN_IF_ERROR(impl_->AddDataset(
      {id, std::string(label_column), std::make_shared<LabeledDataset>(std::move(data))}));
  return response.dump();
}

absl::StatusOr<std::string> ServiceCore::CreateSession(std::string_view request_json) {
  ASSIGN_OR_RETURN(const json request, ParseBody(request_json));
  std::string dataset_id = kSyntheticId;
  RETURN_IF_ERROR(ReadField(request, "dataset", dataset_id));

  auto session = std::make_shared<Session>();
  std::string scheme_name(WeightSchemeName(WeightScheme::kIsolationForest));
  RETURN_IF_ERROR(ReadField(request, "seed", session->forest_options.seed));
  RETURN_IF_ERROR(ReadField(request, "scheme", scheme_name));
  RETURN_IF_ERROR(ReadField(request, "trees", session->forest_options.num_trees));
  RETURN_IF_ERROR(ReadField(request, "subsample", session->forest_options.subsample_size));
  RETURN_IF_ERROR(ReadField(request, "tau", session->config.tau));
  RETURN_IF_ERROR(ReadField(request, "c_a", session->config.c_a));
  RETURN_IF_ERROR(ReadField(request, "c_xi", session->config.c_xi));
  RETURN_IF_ERROR(ReadField(request, "learning_rate", session->config.learning_rate));
  RETURN_IF_ERROR(ReadField(request, "max_steps", session->config.max_steps));
  RETURN_IF_ERROR(ReadField(request, "budget", session->config.budget));
  const std::optional<WeightScheme> scheme = ParseWeightScheme(scheme_name);
  if (!scheme) {
    return absl::InvalidArgumentError(absl::StrCat("unknown scheme '", scheme_name, "'"));
  }
  session->forest_options.scheme = *scheme;
  RETURN_IF_ERROR(session->config.Validate());
  if (session->forest_options.num_trees < 1 || session->forest_options.subsample_size < 1) {
    return absl::InvalidArgumentError("trees and subsample must be positive");
  }

  ASSIGN_OR_RETURN(const DatasetEntry dataset, impl_->FindDataset(dataset_id));
  if (static_cast<size_t>(session->config.budget) > dataset.data->size()) {
    return absl::InvalidArgumentError(absl::StrCat("budget ", session->config.budget,
                                                   " exceeds dataset size ",
                                                   dataset.data->size()));
  }
  session->id = impl_->NewSessionId();
  session->dataset_id = dataset.id;
  session->dataset = dataset.data;
  session->created_at_ms = session->updated_at_ms = NowMs();
  ASSIGN_OR_RETURN(session->bundle, impl_->GetForest(dataset, session->forest_options));
  FeedbackLearner learner(session->bundle->all_z, session->config);
  ASSIGN_OR_RETURN(session->pending, PendingQuery(learner));
  RETURN_IF_ERROR(impl_->Persist(Snapshot(*session, learner, session->updated_at_ms)));
  session->learner.emplace(std::move(learner));
  const std::string state = StateJson(*session).dump();
  std::unique_lock lock(impl_->sessions_mu);
  impl_->sessions[session->id] = std::move(session);
  return state;
}

absl::StatusOr<std::string> ServiceCore::GetNext(std::string_view session_id) {
  ASSIGN_OR_RETURN(const std::shared_ptr<Session> session, impl_->FindSession(session_id));
  std::lock_guard lock(session->mu);
  if (!session->pending) return absl::FailedPreconditionError("budget exhausted");
  return NextPayload(*session).dump();
}

absl::StatusOr<std::string> ServiceCore::SubmitLabel(std::string_view session_id,
                                                     std::string_view request_json) {
  ASSIGN_OR_RETURN(const json request, ParseBody(request_json));
  if (!request.contains("instance_id") || !request.at("instance_id").is_number_integer()) {
    return absl::InvalidArgumentError("instance_id must be an integer");
  }
  if (!request.contains("label") || !request.at("label").is_string()) {
    return absl::InvalidArgumentError("label must be \"anomaly\" or \"nominal\"");
  }
  const std::optional<Label> label = ParseLabel(request.at("label").get<std::string>());
  if (!label) return absl::InvalidArgumentError("label must be \"anomaly\" or \"nominal\"");
  const int64_t instance_id = request.at("instance_id").get<int64_t>();

  ASSIGN_OR_RETURN(const std::shared_ptr<Session> session, impl_->FindSession(session_id));
  std::lock_guard lock(session->mu);
  if (!session->pending) return absl::FailedPreconditionError("budget exhausted");
  if (instance_id != *session->pending) {
    return absl::FailedPreconditionError(
        absl::StrCat("stale label: instance ", instance_id, " is not the pending query ",
                     *session->pending));
  }

  // Work on a copy so a failed update or write leaves the session untouched.
  FeedbackLearner next = *session->learner;
  ASSIGN_OR_RETURN(const WeightUpdate update, next.Incorporate(instance_id, *label));
  (void)update;
  ASSIGN_OR_RETURN(const std::optional<int64_t> pending, PendingQuery(next));
  const int64_t now = NowMs();
  RETURN_IF_ERROR(impl_->Persist(Snapshot(*session, next, now)));
  session->learner.emplace(std::move(next));
  session->pending = pending;
  session->updated_at_ms = now;

  const FeedbackState& state = session->learner->state();
  const int32_t found = AnomaliesFound(state);
  const json response = {
      {"accepted", true},
      {"session_id", session->id},
      {"iteration", state.iteration},
      {"anomalies_found", found},
      {"curve_point", {{"iteration", state.iteration}, {"anomalies_found", found}}},
      {"status", session->pending ? "active" : "exhausted"},
      {"next", session->pending ? NextPayload(*session) : json(nullptr)},
  };
  return response.dump();
}

absl::StatusOr<std::string> ServiceCore::GetState(std::string_view session_id) {
  ASSIGN_OR_RETURN(const std::shared_ptr<Session> session, impl_->FindSession(session_id));
  std::lock_guard lock(session->mu);
  return StateJson(*session).dump();
}

HttpResponse ServiceCore::ErrorResponse(const absl::Status& status) {
  int http = 500;
  std::string code = "internal";
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
      http = 404;
      code = "not_found";
      break;
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kAborted:
      http = 409;
      code = "conflict";
      break;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      http = 400;
      code = "invalid_argument";
      break;
    case absl::StatusCode::kUnavailable:
      http = 503;
      code = "unavailable";
      break;
    default:
      break;
  }
  const json body = {{"code", code}, {"message", std::string(status.message())}};
  return {http, body.dump()};
}

HttpResponse ServiceCore::Handle(std::string_view method, std::string_view path,
                                 const std::map<std::string, std::string>& params,
                                 std::string_view body) {
  auto respond = [](const absl::StatusOr<std::string>& result, int ok_status = 200) {
    if (!result.ok()) return ErrorResponse(result.status());
    return HttpResponse{ok_status, *result};
  };
  auto method_not_allowed = [] {
    return HttpResponse{405, json{{"code", "method_not_allowed"},
                                  {"message", "method not allowed"}}.dump()};
  };

  std::vector<std::string_view> parts;
  for (size_t start = 1; start <= path.size();) {
    const size_t end = std::min(path.find('/', start), path.size());
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }

  if (parts.size() == 1 && parts[0] == "healthz") {
    if (method != "GET") return method_not_allowed();
    return {200, json{{"status", "ok"}}.dump()};
  }
  if (parts.size() == 1 && parts[0] == "datasets") {
    if (method != "POST") return method_not_allowed();
    const auto name = params.find("name");
    const auto label = params.find("label_column");
    return respond(RegisterDataset(name == params.end() ? "upload" : name->second, body,
                                   label == params.end() ? "label" : label->second),
                   201);
  }
  if (parts.size() == 1 && parts[0] == "sessions") {
    if (method != "POST") return method_not_allowed();
    return respond(CreateSession(body), 201);
  }
  if (parts.size() == 3 && parts[0] == "sessions") {
    if (parts[2] == "next") {
      if (method != "GET") return method_not_allowed();
      return respond(GetNext(parts[1]));
    }
    if (parts[2] == "label") {
      if (method != "POST") return method_not_allowed();
      return respond(SubmitLabel(parts[1], body));
    }
    if (parts[2] == "state") {
      if (method != "GET") return method_not_allowed();
      return respond(GetState(parts[1]));
    }
  }
  return ErrorResponse(
      absl::NotFoundError(absl::StrCat("no route for ", std::string(path))));
}

struct HttpServer::Impl {
  ServiceCore* core = nullptr;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(ServiceCore* core) : impl_(std::make_unique<Impl>()) {
  impl_->core = core;
  auto handler = [this](const httplib::Request& request, httplib::Response& response) {
    std::map<std::string, std::string> params;
    for (const auto& [key, value] : request.params) params.emplace(key, value);
    const HttpResponse result =
        impl_->core->Handle(request.method, request.path, params, request.body);
    response.status = result.status;
    response.set_content(result.body, "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer() { Stop(); }

absl::StatusOr<int> HttpServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    return absl::UnavailableError(absl::StrCat("cannot bind ", host, ":", port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::Wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ifaad
