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

// Session-oriented JSON API for an analyst labeling instances one at a time.
//
//   GET  /healthz
//   POST /datasets?name=N&label_column=C    body: CSV text
//   POST /sessions                          body: {"dataset": id, ...}
//   GET  /sessions/{id}/next
//   POST /sessions/{id}/label               body: {"instance_id", "label"}
//   GET  /sessions/{id}/state
//
// Errors are {"code": ..., "message": ...} with a 4xx/5xx status.

#ifndef IFAAD_SERVICE_H_
#define IFAAD_SERVICE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ifaad {

struct ServiceOptions {
  // Uploaded datasets are stored here and reloaded on start. Empty keeps
  // them in memory only.
  std::string data_dir;
  // One session file per session, rewritten after every accepted label.
  // Empty disables persistence.
  std::string session_dir;
  // Threads for forest construction.
  int32_t num_threads = 1;
};

struct HttpResponse {
  int status = 200;
  // JSON document.
  std::string body;
};

// Transport-independent request handling; all methods are thread-safe.
class ServiceCore {
 public:
  explicit ServiceCore(ServiceOptions options);
  ~ServiceCore();

  ServiceCore(const ServiceCore&) = delete;
  ServiceCore& operator=(const ServiceCore&) = delete;

  // Registers the built-in "synthetic" dataset, reloads stored datasets and
  // resumes persisted sessions.
  absl::Status Start();

  HttpResponse Handle(std::string_view method, std::string_view path,
                      const std::map<std::string, std::string>& params,
                      std::string_view body);

  // The typed operations behind Handle; each returns a JSON document.
  absl::StatusOr<std::string> RegisterDataset(std::string_view name,
                                              std::string_view csv_text,
                                              std::string_view label_column);
  absl::StatusOr<std::string> CreateSession(std::string_view request_json);
  absl::StatusOr<std::string> GetNext(std::string_view session_id);
  absl::StatusOr<std::string> SubmitLabel(std::string_view session_id,
                                          std::string_view request_json);
  absl::StatusOr<std::string> GetState(std::string_view session_id);

  // Error body and HTTP status for a failed operation.
  static HttpResponse ErrorResponse(const absl::Status& status);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Serves a ServiceCore over HTTP on a background thread.
class HttpServer {
 public:
  explicit HttpServer(ServiceCore* core);
  ~HttpServer();

  // Binds and starts serving. Port 0 picks a free port. Returns the port.
  absl::StatusOr<int> Start(const std::string& host, int port);
  void Stop();
  // Blocks until Stop() is called from another thread.
  void Wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ifaad

#endif  // IFAAD_SERVICE_H_
