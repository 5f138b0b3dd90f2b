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

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ifaad/random.h"

namespace ifaad {
namespace {

using ::testing::HasSubstr;

SessionSnapshot Example() {
  SessionSnapshot s;
  s.session_id = "s-0001";
  s.dataset = "synthetic";
  s.config.tau = 0.05;
  s.config.budget = 40;
  s.forest = {.subsample_size = 128, .num_trees = 30,
              .scheme = WeightScheme::kLeafDepth, .seed = 0xFFFFFFFFFFFFFFF1ULL};
  s.query_history = {{4, Label::kAnomaly}, {9, Label::kNominal}};
  RandomEngine rng = MakeEngine(5, 0);
  std::vector<double> w(57);
  for (double& v : w) v = StandardNormal(rng) / 3.0;
  s.weights = WeightVector(w);
  s.created_at_ms = 1700000000000;
  s.updated_at_ms = 1700000005000;
  return s;
}

void ExpectSame(const SessionSnapshot& a, const SessionSnapshot& b) {
  EXPECT_EQ(a.session_id, b.session_id);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(a.config.tau, b.config.tau);
  EXPECT_EQ(a.config.c_a, b.config.c_a);
  EXPECT_EQ(a.config.c_xi, b.config.c_xi);
  EXPECT_EQ(a.config.budget, b.config.budget);
  EXPECT_EQ(a.forest.seed, b.forest.seed);
  EXPECT_EQ(a.forest.scheme, b.forest.scheme);
  EXPECT_EQ(a.forest.num_trees, b.forest.num_trees);
  EXPECT_EQ(a.forest.subsample_size, b.forest.subsample_size);
  EXPECT_EQ(a.query_history, b.query_history);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.created_at_ms, b.created_at_ms);
  EXPECT_EQ(a.updated_at_ms, b.updated_at_ms);
}

TEST(SessionFileTest, RoundTripIsBitExact) {
  const SessionSnapshot s = Example();
  const auto back = DecodeSession(EncodeSession(s));
  ASSERT_TRUE(back.ok()) << back.status();
  ExpectSame(s, *back);
  EXPECT_EQ(EncodeSession(*back), EncodeSession(s));
}

TEST(SessionFileTest, WriteAndRead) {
  const auto path = std::filesystem::temp_directory_path() / "ifaad_session_test.json";
  const SessionSnapshot s = Example();
  ASSERT_TRUE(WriteSessionFile(path.string(), s).ok());
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  const auto back = ReadSessionFile(path.string());
  ASSERT_TRUE(back.ok());
  ExpectSame(s, *back);
  std::filesystem::remove(path);
  EXPECT_EQ(ReadSessionFile(path.string()).status().code(), absl::StatusCode::kNotFound);
}

TEST(SessionFileTest, RejectsBadDocuments) {
  EXPECT_EQ(DecodeSession("{").status().code(), absl::StatusCode::kDataLoss);
  EXPECT_EQ(DecodeSession("{\"format\":\"other\"}").status().code(),
            absl::StatusCode::kDataLoss);
  std::string text = EncodeSession(Example());

  std::string version = text;
  version.replace(version.find("\"version\": 1"), 12, "\"version\": 2");
  EXPECT_EQ(DecodeSession(version).status().code(), absl::StatusCode::kFailedPrecondition);

  std::string label = text;
  label.replace(label.find("\"anomaly\""), 9, "\"weird\"");
  EXPECT_THAT(DecodeSession(label).status().message(), HasSubstr("bad label"));

  std::string iteration = text;
  iteration.replace(iteration.find("\"iteration\": 2"), 14, "\"iteration\": 3");
  EXPECT_THAT(DecodeSession(iteration).status().message(), HasSubstr("iteration"));

  std::string missing = text;
  missing.replace(missing.find("\"weights\""), 9, "\"weightz\"");
  EXPECT_EQ(DecodeSession(missing).status().code(), absl::StatusCode::kDataLoss);
}

}  // namespace
}  // namespace ifaad
