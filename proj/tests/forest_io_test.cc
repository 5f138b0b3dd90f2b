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

#include <string>

#include "gtest/gtest.h"
#include "ifaad/forest.h"
#include "ifaad/random.h"

namespace ifaad {
namespace {

Forest SmallForest(WeightScheme scheme) {
  RandomEngine rng = MakeEngine(3, 0);
  std::vector<Instance> data(40);
  for (int i = 0; i < 40; ++i) {
    data[i] = {{StandardNormal(rng), StandardNormal(rng)}, i};
  }
  return *BuildForest(data, {.subsample_size = 16, .num_trees = 4, .scheme = scheme,
                             .seed = 11});
}

TEST(ForestIoTest, RoundTripBothSchemes) {
  for (WeightScheme scheme : {WeightScheme::kIsolationForest, WeightScheme::kLeafDepth}) {
    const Forest forest = SmallForest(scheme);
    const std::string bytes = SerializeForest(forest);
    const auto decoded = DeserializeForest(bytes);
    ASSERT_TRUE(decoded.ok()) << decoded.status();
    EXPECT_EQ(*decoded, forest);
    EXPECT_EQ(SerializeForest(*decoded), bytes);
  }
}

TEST(ForestIoTest, EveryTruncationIsRejected) {
  const std::string bytes = SerializeForest(SmallForest(WeightScheme::kIsolationForest));
  for (size_t len = 0; len < bytes.size(); ++len) {
    const auto decoded = DeserializeForest(bytes.substr(0, len));
    EXPECT_FALSE(decoded.ok()) << "length " << len;
  }
}

TEST(ForestIoTest, TrailingBytesRejected) {
  const std::string bytes = SerializeForest(SmallForest(WeightScheme::kIsolationForest));
  EXPECT_FALSE(DeserializeForest(bytes + "x").ok());
}

TEST(ForestIoTest, BadMagicAndVersion) {
  std::string bytes = SerializeForest(SmallForest(WeightScheme::kIsolationForest));
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(DeserializeForest(bad_magic).status().code(), absl::StatusCode::kDataLoss);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_EQ(DeserializeForest(bad_version).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

// Random byte flips either decode to a forest that passes validation or fail
// cleanly; they never crash.
TEST(ForestIoTest, ByteFlipsNeverCrash) {
  const std::string bytes = SerializeForest(SmallForest(WeightScheme::kLeafDepth));
  RandomEngine rng = MakeEngine(77, 0);
  int rejected = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::string mutated = bytes;
    const int flips = 1 + static_cast<int>(UniformIndex(rng, 4));
    for (int f = 0; f < flips; ++f) {
      mutated[UniformIndex(rng, mutated.size())] ^=
          static_cast<char>(1u << UniformIndex(rng, 8));
    }
    const auto decoded = DeserializeForest(mutated);
    if (decoded.ok()) {
      EXPECT_TRUE(ValidateForest(*decoded).ok());
    } else {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 0);
}

}  // namespace
}  // namespace ifaad
