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

// Versioned JSON snapshot of a feedback session. Together with the dataset
// it is enough to rebuild the forest (from the recorded seed) and resume the
// loop at the same next query.

#ifndef IFAAD_SESSION_FILE_H_
#define IFAAD_SESSION_FILE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ifaad/aad.h"
#include "ifaad/forest.h"
#include "ifaad/weights.h"

namespace ifaad {

inline constexpr int kSessionFormatVersion = 1;

struct SessionSnapshot {
  std::string session_id;
  std::string dataset;
  AadConfig config;
  // Seed, scheme, tree count and subsample size of the session's forest.
  ForestOptions forest;
  std::vector<QueryRecord> query_history;
  WeightVector weights;
  int64_t created_at_ms = 0;
  int64_t updated_at_ms = 0;
};

std::string EncodeSession(const SessionSnapshot& snapshot);
absl::StatusOr<SessionSnapshot> DecodeSession(std::string_view text);

absl::Status WriteSessionFile(const std::string& path,
                              const SessionSnapshot& snapshot);
absl::StatusOr<SessionSnapshot> ReadSessionFile(const std::string& path);

}  // namespace ifaad

#endif  // IFAAD_SESSION_FILE_H_
