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

#include "ifaad/session_file.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace ifaad {

using nlohmann::json;

std::string EncodeSession(const SessionSnapshot& snapshot) {
  json history = json::array();
  for (const QueryRecord& record : snapshot.query_history) {
    history.push_back({{"id", record.id}, {"label", LabelName(record.label)}});
  }
  const json doc = {
      {"format", "ifaad-session"},
      {"version", kSessionFormatVersion},
      {"session_id", snapshot.session_id},
      {"dataset", snapshot.dataset},
      {"created_at_ms", snapshot.created_at_ms},
      {"updated_at_ms", snapshot.updated_at_ms},
      {"config",
       {{"tau", snapshot.config.tau},
        {"c_a", snapshot.config.c_a},
        {"c_xi", snapshot.config.c_xi},
        {"learning_rate", snapshot.config.learning_rate},
        {"max_steps", snapshot.config.max_steps},
        {"convergence_tol", snapshot.config.convergence_tol},
        {"budget", snapshot.config.budget}}},
      {"forest",
       {{"seed", snapshot.forest.seed},
        {"scheme", WeightSchemeName(snapshot.forest.scheme)},
        {"trees", snapshot.forest.num_trees},
        {"subsample", snapshot.forest.subsample_size}}},
      {"iteration", snapshot.query_history.size()},
      {"query_history", std::move(history)},
      // nlohmann/json prints doubles in shortest round-trip form.
      {"weights", std::vector<double>(snapshot.weights.values().begin(),
                                      snapshot.weights.values().end())},
  };
  return doc.dump(1);
}

absl::StatusOr<SessionSnapshot> DecodeSession(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    return absl::DataLossError(absl::StrCat("session file is not valid JSON: ", e.what()));
  }
  try {
    if (doc.at("format").get<std::string>() != "ifaad-session") {
      return absl::DataLossError("not an ifaad session file");
    }
    const int version = doc.at("version").get<int>();
    if (version != kSessionFormatVersion) {
      return absl::FailedPreconditionError(
          absl::StrCat("unsupported session format version ", version));
    }
    SessionSnapshot snapshot;
    snapshot.session_id = doc.at("session_id").get<std::string>();
    snapshot.dataset = doc.at("dataset").get<std::string>();
    snapshot.created_at_ms = doc.at("created_at_ms").get<int64_t>();
    snapshot.updated_at_ms = doc.at("updated_at_ms").get<int64_t>();

    const json& config = doc.at("config");
    snapshot.config.tau = config.at("tau").get<double>();
    snapshot.config.c_a = config.at("c_a").get<double>();
    snapshot.config.c_xi = config.at("c_xi").get<double>();
    snapshot.config.learning_rate = config.at("learning_rate").get<double>();
    snapshot.config.max_steps = config.at("max_steps").get<int32_t>();
    snapshot.config.convergence_tol = config.at("convergence_tol").get<double>();
    snapshot.config.budget = config.at("budget").get<int32_t>();

    const json& forest = doc.at("forest");
    snapshot.forest.seed = forest.at("seed").get<uint64_t>();
    const auto scheme = ParseWeightScheme(forest.at("scheme").get<std::string>());
    if (!scheme) return absl::DataLossError("unknown weight scheme in session file");
    snapshot.forest.scheme = *scheme;
    snapshot.forest.num_trees = forest.at("trees").get<int32_t>();
    snapshot.forest.subsample_size = forest.at("subsample").get<int32_t>();

    for (const json& item : doc.at("query_history")) {
      const auto label = ParseLabel(item.at("label").get<std::string>());
      if (!label) return absl::DataLossError("bad label in session file");
      snapshot.query_history.push_back({item.at("id").get<int64_t>(), *label});
    }
    if (doc.at("iteration").get<size_t>() != snapshot.query_history.size()) {
      return absl::DataLossError("iteration does not match query history length");
    }
    snapshot.weights = WeightVector(doc.at("weights").get<std::vector<double>>());
    return snapshot;
  } catch (const json::exception& e) {
    return absl::DataLossError(absl::StrCat("malformed session file: ", e.what()));
  }
}

absl::Status WriteSessionFile(const std::string& path,
                              const SessionSnapshot& snapshot) {
  // Written to a sibling file, then renamed over the target.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", tmp));
    out << EncodeSession(snapshot);
    if (!out.flush()) return absl::UnavailableError(absl::StrCat("cannot write ", tmp));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat("cannot rename to ", path, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<SessionSnapshot> ReadSessionFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DecodeSession(buffer.str());
}

}  // namespace ifaad
