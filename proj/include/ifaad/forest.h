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

// Isolation forest viewed as a linear model over tree nodes.
//
// Every node of every tree is a feature. An instance activates the nodes on
// its root-to-leaf path in each tree, and the activated feature carries the
// node's detector score (-1 for every node under the isolation forest
// scheme). The anomaly score of an instance is the dot product of this sparse
// vector with a learnable weight vector. With uniform positive weights the
// score is proportional to minus the total path length, which reproduces the
// ordinary isolation forest ranking.

#ifndef IFAAD_FOREST_H_
#define IFAAD_FOREST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ifaad/weights.h"

namespace ifaad {

struct Instance {
  std::vector<double> features;
  int64_t id = 0;
};

// How detector scores are assigned to tree nodes.
enum class WeightScheme : uint8_t {
  // Every node scores -1.
  kIsolationForest = 0,
  // Internal nodes score 0, a leaf at depth d scores -(d + 1).
  kLeafDepth = 1,
};

std::string_view WeightSchemeName(WeightScheme scheme);
std::optional<WeightScheme> ParseWeightScheme(std::string_view name);

// Node score for a node at `depth` under `scheme`.
double SchemeNodeScore(WeightScheme scheme, bool is_leaf, int32_t depth);

struct TreeNode {
  int32_t global_index = 0;
  bool is_leaf = true;
  // Internal nodes only.
  int32_t split_feature = -1;
  double split_threshold = 0.0;
  // Positions of the children within the owning tree's node array.
  int32_t left = -1;
  int32_t right = -1;
  int32_t depth = 0;
  int32_t train_count = 0;
  double node_score = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes in depth-first pre-order; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct Forest {
  WeightScheme scheme = WeightScheme::kIsolationForest;
  uint64_t seed = 0;
  int32_t subsample_size = 0;
  int32_t num_features = 0;
  // Total node count m across all trees. Global indices cover [0, m), trees
  // concatenated in build order.
  int32_t num_nodes = 0;
  std::vector<Tree> trees;

  int32_t num_trees() const { return static_cast<int32_t>(trees.size()); }

  friend bool operator==(const Forest&, const Forest&) = default;
};

struct NodeEntry {
  int32_t index = 0;
  double value = 0.0;

  friend bool operator==(const NodeEntry&, const NodeEntry&) = default;
};

// Per-instance node features. Entries are sorted by strictly increasing
// index; zero-valued entries are omitted.
struct SparseNodeVector {
  std::vector<NodeEntry> entries;
  int32_t num_nodes = 0;

  friend bool operator==(const SparseNodeVector&,
                         const SparseNodeVector&) = default;
};

struct ForestOptions {
  int32_t subsample_size = 256;
  int32_t num_trees = 100;
  WeightScheme scheme = WeightScheme::kIsolationForest;
  uint64_t seed = 0;
  // Trees are independent streams, so any thread count yields the same
  // forest.
  int num_threads = 1;
};

// Builds `options.num_trees` randomized isolation trees, each from a
// subsample of min(subsample_size, |data|) instances drawn without
// replacement. A node stops splitting when it holds one instance or when all
// features are constant over its instances.
absl::StatusOr<Forest> BuildForest(std::span<const Instance> data,
                                   const ForestOptions& options);

absl::StatusOr<SparseNodeVector> Traverse(const Forest& forest,
                                          std::span<const double> features);
absl::StatusOr<SparseNodeVector> Traverse(const Forest& forest,
                                          const Instance& instance);

// Node vectors of every instance, indexed like `data`.
absl::StatusOr<std::vector<SparseNodeVector>> TraverseAll(
    const Forest& forest, std::span<const Instance> data);

// Sparse dot product; higher is more anomalous.
absl::StatusOr<double> Score(const SparseNodeVector& z, const WeightVector& w);

// Same as Score without the dimension check.
double ScoreUnchecked(const SparseNodeVector& z, std::span<const double> w);

// Instance ids in descending score order under uniform weights; ties go to
// the smaller id.
absl::StatusOr<std::vector<int64_t>> BaselineRank(
    const Forest& forest, std::span<const Instance> data);

// Versioned little-endian binary encoding. Round-trips bit-exactly.
std::string SerializeForest(const Forest& forest);
absl::StatusOr<Forest> DeserializeForest(std::string_view bytes);

// Checks the structural invariants: index bijection, child links, depths,
// train counts and scheme scores.
absl::Status ValidateForest(const Forest& forest);

}  // namespace ifaad

#endif  // IFAAD_FOREST_H_
