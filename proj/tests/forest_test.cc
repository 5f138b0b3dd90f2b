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

#include "ifaad/forest.h"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ifaad/data.h"
#include "ifaad/random.h"
#include "oracles.h"

namespace ifaad {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::vector<Instance> RandomData(int n, int dims, uint64_t seed) {
  RandomEngine rng = MakeEngine(seed, 99);
  std::vector<Instance> data(n);
  for (int i = 0; i < n; ++i) {
    data[i].id = i;
    for (int f = 0; f < dims; ++f) data[i].features.push_back(StandardNormal(rng));
  }
  return data;
}

std::vector<Instance> FromValues(const std::vector<std::vector<double>>& rows) {
  std::vector<Instance> data;
  for (size_t i = 0; i < rows.size(); ++i) {
    data.push_back({rows[i], static_cast<int64_t>(i)});
  }
  return data;
}

// A tree whose leftmost path is a chain of `path_nodes` nodes split on
// feature 0 at threshold 0; every right child is a leaf.
Tree ChainTree(int path_nodes, int32_t offset, WeightScheme scheme) {
  Tree tree;
  std::function<int(int)> build = [&](int depth) {
    const int here = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const bool leaf = depth == path_nodes - 1;
    TreeNode& node = tree.nodes[here];
    node.global_index = offset + here;
    node.is_leaf = leaf;
    node.depth = depth;
    node.train_count = path_nodes - depth;
    node.node_score = SchemeNodeScore(scheme, leaf, depth);
    if (leaf) {
      node.train_count = 1;
      return here;
    }
    node.split_feature = 0;
    node.split_threshold = 0.0;
    const int left = build(depth + 1);
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& r = tree.nodes[right];
    r.global_index = offset + right;
    r.depth = depth + 1;
    r.train_count = 1;
    r.node_score = SchemeNodeScore(scheme, true, depth + 1);
    tree.nodes[here].left = left;
    tree.nodes[here].right = right;
    return here;
  };
  build(0);
  return tree;
}

Forest ForestOf(std::vector<Tree> trees, WeightScheme scheme) {
  Forest forest;
  forest.scheme = scheme;
  forest.num_features = 1;
  forest.subsample_size = 256;
  int32_t m = 0;
  for (const Tree& tree : trees) m += static_cast<int32_t>(tree.nodes.size());
  forest.num_nodes = m;
  forest.trees = std::move(trees);
  return forest;
}

TEST(BuildForestTest, SingleInstanceIsOneLeaf) {
  const auto forest = BuildForest(FromValues({{1.5, 2.0}}), {.subsample_size = 8,
                                                              .num_trees = 1});
  ASSERT_TRUE(forest.ok()) << forest.status();
  ASSERT_EQ(forest->num_trees(), 1);
  EXPECT_EQ(forest->num_nodes, 1);
  const TreeNode& root = forest->trees[0].nodes[0];
  EXPECT_TRUE(root.is_leaf);
  EXPECT_EQ(root.depth, 0);
  EXPECT_EQ(root.train_count, 1);
}

TEST(BuildForestTest, DefaultsSubsample256Of512) {
  const auto forest = BuildForest(RandomData(512, 3, 1), ForestOptions{});
  ASSERT_TRUE(forest.ok()) << forest.status();
  EXPECT_EQ(forest->num_trees(), 100);
  for (const Tree& tree : forest->trees) EXPECT_EQ(tree.nodes[0].train_count, 256);
  EXPECT_TRUE(ValidateForest(*forest).ok());
}

TEST(BuildForestTest, SubsampleCappedAtDatasetSize) {
  const auto forest = BuildForest(RandomData(40, 2, 2), {.subsample_size = 256,
                                                         .num_trees = 5});
  ASSERT_TRUE(forest.ok());
  for (const Tree& tree : forest->trees) EXPECT_EQ(tree.nodes[0].train_count, 40);
}

// Replays the 1-D build from the same engine stream: the subsample shuffle,
// then pre-order splits each drawing a feature index and a unit uniform.
TEST(BuildForestTest, FourPointsReplayedFromRngDraws) {
  const std::vector<double> values = {0.0, 1.0, 2.0, 3.0};
  const uint64_t seed = 17;
  const auto forest = BuildForest(FromValues({{0.0}, {1.0}, {2.0}, {3.0}}),
                                  {.subsample_size = 4, .num_trees = 1, .seed = seed});
  ASSERT_TRUE(forest.ok());

  RandomEngine rng = MakeEngine(seed, 0);
  for (uint64_t i = 0; i < 4; ++i) UniformIndex(rng, 4 - i);
  std::vector<double> expected_thresholds;
  std::function<void(std::vector<double>)> replay = [&](std::vector<double> u) {
    if (u.size() == 1) return;
    UniformIndex(rng, 1);
    const double lo = *std::min_element(u.begin(), u.end());
    const double hi = *std::max_element(u.begin(), u.end());
    const double t = lo + UniformUnit(rng) * (hi - lo);
    expected_thresholds.push_back(t);
    std::vector<double> left, right;
    for (double v : u) (v <= t ? left : right).push_back(v);
    replay(left);
    replay(right);
  };
  replay(values);

  std::vector<double> thresholds;
  int leaves = 0;
  for (const TreeNode& node : forest->trees[0].nodes) {
    if (node.is_leaf) {
      ++leaves;
      EXPECT_EQ(node.train_count, 1);
    } else {
      thresholds.push_back(node.split_threshold);
    }
  }
  EXPECT_EQ(leaves, 4);
  EXPECT_EQ(thresholds, expected_thresholds);

  // Brute-force membership: each point lands in its own leaf, and every leaf
  // region contains exactly one of the points.
  const auto trees = oracle::DecodeTrees(SerializeForest(*forest));
  std::set<int> reached;
  for (double v : values) {
    int node = 0;
    while (!trees[0][node].leaf) {
      node = v <= trees[0][node].threshold ? trees[0][node].left : trees[0][node].right;
    }
    reached.insert(node);
  }
  EXPECT_EQ(reached.size(), 4u);
}

TEST(BuildForestTest, ErrorPaths) {
  EXPECT_THAT(BuildForest({}, {}).status().message(), HasSubstr("empty dataset"));
  EXPECT_THAT(BuildForest(FromValues({{1.0}, {std::nan("")}}), {}).status().message(),
              HasSubstr("non-finite input"));
  EXPECT_THAT(BuildForest(FromValues({{1.0}, {std::numeric_limits<double>::infinity()}}),
                          {})
                  .status()
                  .message(),
              HasSubstr("non-finite input"));
  EXPECT_THAT(BuildForest(FromValues({{1.0, 2.0}, {1.0}}), {}).status().message(),
              HasSubstr("dimensionality mismatch"));
  EXPECT_FALSE(BuildForest(FromValues({{1.0}}), {.subsample_size = 0}).ok());
  EXPECT_FALSE(BuildForest(FromValues({{1.0}}), {.num_trees = 0}).ok());
}

TEST(BuildForestTest, DuplicatesMakeMultiInstanceLeaf) {
  const auto forest = BuildForest(FromValues({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}),
                                  {.num_trees = 3});
  ASSERT_TRUE(forest.ok());
  for (const Tree& tree : forest->trees) {
    ASSERT_EQ(tree.nodes.size(), 1u);
    EXPECT_EQ(tree.nodes[0].train_count, 3);
    EXPECT_EQ(tree.nodes[0].node_score, -1.0);
  }
}

TEST(BuildForestTest, DeterministicAndThreadIndependent) {
  const auto data = RandomData(300, 4, 3);
  const auto a = BuildForest(data, {.num_trees = 20, .seed = 5});
  const auto b = BuildForest(data, {.num_trees = 20, .seed = 5});
  const auto c = BuildForest(data, {.num_trees = 20, .seed = 5, .num_threads = 4});
  const auto d = BuildForest(data, {.num_trees = 20, .seed = 6});
  ASSERT_TRUE(a.ok() && b.ok() && c.ok() && d.ok());
  EXPECT_EQ(SerializeForest(*a), SerializeForest(*b));
  EXPECT_EQ(SerializeForest(*a), SerializeForest(*c));
  EXPECT_NE(SerializeForest(*a), SerializeForest(*d));
}

// With the subsample covering the whole dataset, routing the data reproduces
// every node's train count, and thresholds sit within the node's range.
TEST(BuildForestTest, PartitionAndThresholdProperties) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = RandomData(60, 3, 100 + seed);
    const auto forest = BuildForest(data, {.subsample_size = 60, .num_trees = 5,
                                           .seed = seed});
    ASSERT_TRUE(forest.ok());
    ASSERT_TRUE(ValidateForest(*forest).ok());
    for (const Tree& tree : forest->trees) {
      std::vector<int> reached(tree.nodes.size(), 0);
      std::vector<double> lo(tree.nodes.size(), INFINITY), hi(tree.nodes.size(), -INFINITY);
      for (const Instance& x : data) {
        int pos = 0;
        while (true) {
          ++reached[pos];
          const TreeNode& node = tree.nodes[pos];
          if (node.is_leaf) break;
          lo[pos] = std::min(lo[pos], x.features[node.split_feature]);
          hi[pos] = std::max(hi[pos], x.features[node.split_feature]);
          const bool goes_left = x.features[node.split_feature] <= node.split_threshold;
          const bool goes_right = x.features[node.split_feature] > node.split_threshold;
          ASSERT_NE(goes_left, goes_right);
          pos = goes_left ? node.left : node.right;
        }
      }
      for (size_t i = 0; i < tree.nodes.size(); ++i) {
        const TreeNode& node = tree.nodes[i];
        EXPECT_EQ(reached[i], node.train_count);
        if (!node.is_leaf) {
          EXPECT_EQ(tree.nodes[node.left].train_count + tree.nodes[node.right].train_count,
                    node.train_count);
          EXPECT_GE(node.split_threshold, lo[i]);
          EXPECT_LE(node.split_threshold, hi[i]);
        }
      }
    }
  }
}

TEST(BuildForestTest, GlobalIndicesArePreOrderBijection) {
  const auto forest = BuildForest(RandomData(100, 2, 4), {.num_trees = 7});
  ASSERT_TRUE(forest.ok());
  int32_t expected = 0;
  for (const Tree& tree : forest->trees) {
    for (const TreeNode& node : tree.nodes) EXPECT_EQ(node.global_index, expected++);
  }
  EXPECT_EQ(expected, forest->num_nodes);
}

TEST(BuildForestTest, SchemeScores) {
  const auto data = RandomData(50, 2, 5);
  const auto leafy = BuildForest(data, {.num_trees = 3, .scheme = WeightScheme::kLeafDepth});
  ASSERT_TRUE(leafy.ok());
  for (const Tree& tree : leafy->trees) {
    for (const TreeNode& node : tree.nodes) {
      EXPECT_EQ(node.node_score, node.is_leaf ? -(node.depth + 1.0) : 0.0);
    }
  }
}

TEST(TraverseTest, SingleLeafTree) {
  const auto forest = BuildForest(FromValues({{3.0}}), {.num_trees = 1});
  ASSERT_TRUE(forest.ok());
  const auto z = Traverse(*forest, FromValues({{10.0}})[0]);
  ASSERT_TRUE(z.ok());
  EXPECT_THAT(z->entries, ElementsAre(NodeEntry{0, -1.0}));
}

TEST(TraverseTest, PathLengthsThreeAndFive) {
  Tree first = ChainTree(3, 0, WeightScheme::kIsolationForest);
  const auto first_size = static_cast<int32_t>(first.nodes.size());
  Tree second = ChainTree(5, first_size, WeightScheme::kIsolationForest);
  const Forest forest = ForestOf({first, second}, WeightScheme::kIsolationForest);
  ASSERT_TRUE(ValidateForest(forest).ok()) << ValidateForest(forest);

  // -1 goes left at every split, down the full chain.
  const auto z = Traverse(forest, std::vector<double>{-1.0});
  ASSERT_TRUE(z.ok());
  EXPECT_EQ(z->entries.size(), 8u);
  for (const NodeEntry& e : z->entries) EXPECT_EQ(e.value, -1.0);
  for (size_t i = 1; i < z->entries.size(); ++i) {
    EXPECT_LT(z->entries[i - 1].index, z->entries[i].index);
  }
}

TEST(TraverseTest, LeafSchemeDepthFourLeaf) {
  const Forest forest = ForestOf({ChainTree(5, 0, WeightScheme::kLeafDepth)},
                                 WeightScheme::kLeafDepth);
  ASSERT_TRUE(ValidateForest(forest).ok());
  const std::vector<double> x = {-1.0};
  const auto trees = oracle::DecodeTrees(SerializeForest(forest));
  ASSERT_EQ(oracle::LeafDepth(trees[0], 0, x), 4);

  const auto z = Traverse(forest, x);
  ASSERT_TRUE(z.ok());
  ASSERT_EQ(z->entries.size(), 1u);
  EXPECT_EQ(z->entries[0].value, -5.0);
}

TEST(TraverseTest, DimensionMismatch) {
  const auto forest = BuildForest(RandomData(10, 2, 6), {.num_trees = 2});
  ASSERT_TRUE(forest.ok());
  EXPECT_FALSE(Traverse(*forest, std::vector<double>{1.0}).ok());
  EXPECT_FALSE(Traverse(*forest, std::vector<double>{1.0, 2.0, 3.0}).ok());
}

TEST(TraverseTest, LeafCoverage) {
  const auto data = RandomData(200, 3, 7);
  for (WeightScheme scheme : {WeightScheme::kIsolationForest, WeightScheme::kLeafDepth}) {
    const auto forest = BuildForest(data, {.num_trees = 25, .scheme = scheme});
    ASSERT_TRUE(forest.ok());
    const auto trees = oracle::DecodeTrees(SerializeForest(*forest));
    for (const Instance& x : data) {
      const auto z = Traverse(*forest, x);
      ASSERT_TRUE(z.ok());
      if (scheme == WeightScheme::kLeafDepth) {
        EXPECT_EQ(z->entries.size(), 25u);
      } else {
        size_t nodes = 0;
        for (const auto& tree : trees) nodes += oracle::LeafDepth(tree, 0, x.features) + 1;
        EXPECT_EQ(z->entries.size(), nodes);
      }
    }
  }
}

TEST(ScoreTest, Examples) {
  EXPECT_EQ(*Score(SparseNodeVector{{}, 4}, WeightVector::Uniform(4)), 0.0);
  const SparseNodeVector z{{{0, -1.0}, {3, -1.0}}, 4};
  EXPECT_DOUBLE_EQ(*Score(z, WeightVector::Uniform(4)), -1.0);
  EXPECT_FALSE(Score(z, WeightVector::Uniform(5)).ok());
}

// Uniform-weight scores order instances exactly like shortest average path.
TEST(ScoreTest, UniformWeightsMatchPathLengthOracle) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = RandomData(100, 2, 200 + seed);
    const auto forest = BuildForest(data, {.num_trees = 30, .seed = seed});
    ASSERT_TRUE(forest.ok());
    std::vector<std::vector<double>> points;
    for (const Instance& x : data) points.push_back(x.features);
    const auto expected = oracle::RankByPathLength(
        oracle::DecodeTrees(SerializeForest(*forest)), points);
    const auto ranked = BaselineRank(*forest, data);
    ASSERT_TRUE(ranked.ok());
    EXPECT_EQ(*ranked, expected);
  }
}

TEST(BaselineRankTest, TrivialCases) {
  const auto one = FromValues({{2.0}});
  const auto forest = BuildForest(one, {.num_trees = 3});
  ASSERT_TRUE(forest.ok());
  EXPECT_THAT(*BaselineRank(*forest, one), ElementsAre(0));

  const auto twins = FromValues({{1.0, 1.0}, {1.0, 1.0}});
  const auto twin_forest = BuildForest(twins, {.num_trees = 3});
  ASSERT_TRUE(twin_forest.ok());
  EXPECT_THAT(*BaselineRank(*twin_forest, twins), ElementsAre(0, 1));
}

TEST(BaselineRankTest, SyntheticAnomaliesRankHigher) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledDataset ds = MakeSynthetic2d(500, 15, seed);
    const auto forest = BuildForest(ds.instances, {.seed = seed});
    ASSERT_TRUE(forest.ok());
    const auto ranked = BaselineRank(*forest, ds.instances);
    ASSERT_TRUE(ranked.ok());
    double anomaly_rank = 0.0, nominal_rank = 0.0;
    for (size_t r = 0; r < ranked->size(); ++r) {
      ((ds.truth[(*ranked)[r]] == Label::kAnomaly) ? anomaly_rank : nominal_rank) +=
          static_cast<double>(r);
    }
    anomaly_rank /= static_cast<double>(ds.num_anomalies());
    nominal_rank /= static_cast<double>(ds.size() - ds.num_anomalies());
    EXPECT_LT(anomaly_rank, nominal_rank) << "seed " << seed;
  }
}

}  // namespace
}  // namespace ifaad
