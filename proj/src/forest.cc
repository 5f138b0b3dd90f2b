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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ifaad/random.h"
#include "ifaad/status_macros.h"

namespace ifaad {

namespace {

struct Split {
  int32_t feature = -1;
  double threshold = 0.0;
};

absl::Status ValidateData(std::span<const Instance> data) {
  if (data.empty()) return absl::InvalidArgumentError("empty dataset");
  const size_t dims = data.front().features.size();
  if (dims == 0) {
    return absl::InvalidArgumentError("instances must have at least one feature");
  }
  for (const Instance& instance : data) {
    if (instance.features.size() != dims) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dimensionality mismatch: instance ", instance.id, " has ",
          instance.features.size(), " features, expected ", dims));
    }
    for (double v : instance.features) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("non-finite input in instance ", instance.id));
      }
    }
  }
  return absl::OkStatus();
}

bool AllFeaturesConstant(std::span<const Instance> data,
                         std::span<const int32_t> rows, int32_t num_features) {
  for (int32_t f = 0; f < num_features; ++f) {
    const double first = data[rows.front()].features[f];
    for (int32_t row : rows) {
      if (data[row].features[f] != first) return false;
    }
  }
  return true;
}

// Samples a feature uniformly and a threshold uniformly in [min, max] of that
// feature over `rows`. A constant feature is redrawn, up to `num_features`
// draws in total.
std::optional<Split> ChooseSplit(std::span<const Instance> data,
                                 std::span<const int32_t> rows,
                                 int32_t num_features, RandomEngine& rng) {
  if (AllFeaturesConstant(data, rows, num_features)) return std::nullopt;
  for (int32_t attempt = 0; attempt < num_features; ++attempt) {
    const auto feature = static_cast<int32_t>(UniformIndex(rng, num_features));
    double lo = data[rows.front()].features[feature];
    double hi = lo;
    for (int32_t row : rows) {
      lo = std::min(lo, data[row].features[feature]);
      hi = std::max(hi, data[row].features[feature]);
    }
    if (lo == hi) continue;
    double threshold = lo + UniformUnit(rng) * (hi - lo);
    // Rounding can land on the max, which would leave the right side empty.
    if (threshold >= hi) threshold = std::nextafter(hi, lo);
    return Split{feature, threshold};
  }
  return std::nullopt;
}

Tree BuildTree(std::span<const Instance> data, int32_t num_features,
               int32_t subsample_size, WeightScheme scheme, RandomEngine rng) {
  const auto total = static_cast<int32_t>(data.size());
  const int32_t sample_count = std::min(subsample_size, total);

  // Partial Fisher-Yates: the first sample_count slots become the subsample.
  std::vector<int32_t> rows(total);
  std::iota(rows.begin(), rows.end(), 0);
  for (int32_t i = 0; i < sample_count; ++i) {
    const auto j = i + static_cast<int32_t>(UniformIndex(rng, total - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(sample_count);

  struct Pending {
    int32_t begin;
    int32_t end;
    int32_t depth;
    int32_t parent;
    bool is_left;
  };

  Tree tree;
  std::vector<Pending> stack = {{0, sample_count, 0, -1, false}};
  while (!stack.empty()) {
    const Pending item = stack.back();
    stack.pop_back();

    const auto position = static_cast<int32_t>(tree.nodes.size());
    if (item.parent >= 0) {
      TreeNode& parent = tree.nodes[item.parent];
      (item.is_left ? parent.left : parent.right) = position;
    }

    TreeNode node;
    node.global_index = position;
    node.depth = item.depth;
    node.train_count = item.end - item.begin;

    const std::span<int32_t> node_rows(rows.data() + item.begin,
                                       rows.data() + item.end);
    std::optional<Split> split;
    if (node.train_count > 1) {
      split = ChooseSplit(data, node_rows, num_features, rng);
    }
    node.is_leaf = !split.has_value();
    node.node_score = SchemeNodeScore(scheme, node.is_leaf, node.depth);
    if (split) {
      node.split_feature = split->feature;
      node.split_threshold = split->threshold;
    }
    tree.nodes.push_back(node);
    if (!split) continue;

    const auto middle = std::partition(
        node_rows.begin(), node_rows.end(), [&](int32_t row) {
          return data[row].features[split->feature] <= split->threshold;
        });
    const auto mid = item.begin + static_cast<int32_t>(middle - node_rows.begin());
    // Right first so the left subtree is expanded next (pre-order).
    stack.push_back({mid, item.end, item.depth + 1, position, false});
    stack.push_back({item.begin, mid, item.depth + 1, position, true});
  }
  return tree;
}

}  // namespace

std::string_view WeightSchemeName(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kIsolationForest:
      return "isolation-forest";
    case WeightScheme::kLeafDepth:
      return "leaf-depth";
  }
  return "unknown";
}

std::optional<WeightScheme> ParseWeightScheme(std::string_view name) {
  if (name == "isolation-forest") return WeightScheme::kIsolationForest;
  if (name == "leaf-depth") return WeightScheme::kLeafDepth;
  return std::nullopt;
}

double SchemeNodeScore(WeightScheme scheme, bool is_leaf, int32_t depth) {
  switch (scheme) {
    case WeightScheme::kIsolationForest:
      return -1.0;
    case WeightScheme::kLeafDepth:
      return is_leaf ? -static_cast<double>(depth + 1) : 0.0;
  }
  return 0.0;
}

absl::StatusOr<Forest> BuildForest(std::span<const Instance> data,
                                   const ForestOptions& options) {
  RETURN_IF_ERROR(ValidateData(data));
  if (options.subsample_size < 1) {
    return absl::InvalidArgumentError("subsample size must be at least 1");
  }
  if (options.num_trees < 1) {
    return absl::InvalidArgumentError("number of trees must be at least 1");
  }

  Forest forest;
  forest.scheme = options.scheme;
  forest.seed = options.seed;
  forest.subsample_size = options.subsample_size;
  forest.num_features = static_cast<int32_t>(data.front().features.size());
  forest.trees.resize(options.num_trees);

  const int num_threads =
      std::clamp(options.num_threads, 1, static_cast<int>(options.num_trees));
  auto build_range = [&](int worker) {
    for (int32_t t = worker; t < options.num_trees; t += num_threads) {
      forest.trees[t] =
          BuildTree(data, forest.num_features, options.subsample_size,
                    options.scheme, MakeEngine(options.seed, t));
    }
  };
  if (num_threads == 1) {
    build_range(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(num_threads);
    for (int w = 0; w < num_threads; ++w) workers.emplace_back(build_range, w);
  }

  int32_t offset = 0;
  for (Tree& tree : forest.trees) {
    for (TreeNode& node : tree.nodes) node.global_index += offset;
    offset += static_cast<int32_t>(tree.nodes.size());
  }
  forest.num_nodes = offset;
  return forest;
}

absl::StatusOr<SparseNodeVector> Traverse(const Forest& forest,
                                          std::span<const double> features) {
  if (static_cast<int32_t>(features.size()) != forest.num_features) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimensionality mismatch: got ", features.size(),
                     " features, forest expects ", forest.num_features));
  }
  for (double v : features) {
    if (!std::isfinite(v)) return absl::InvalidArgumentError("non-finite input");
  }
  SparseNodeVector z;
  z.num_nodes = forest.num_nodes;
  for (const Tree& tree : forest.trees) {
    int32_t position = 0;
    while (true) {
      const TreeNode& node = tree.nodes[position];
      if (node.node_score != 0.0) {
        z.entries.push_back({node.global_index, node.node_score});
      }
      if (node.is_leaf) break;
      position = features[node.split_feature] <= node.split_threshold
                     ? node.left
                     : node.right;
    }
  }
  return z;
}

absl::StatusOr<SparseNodeVector> Traverse(const Forest& forest,
                                          const Instance& instance) {
  return Traverse(forest, std::span<const double>(instance.features));
}

absl::StatusOr<std::vector<SparseNodeVector>> TraverseAll(
    const Forest& forest, std::span<const Instance> data) {
  std::vector<SparseNodeVector> all;
  all.reserve(data.size());
  for (const Instance& instance : data) {
    ASSIGN_OR_RETURN(SparseNodeVector z, Traverse(forest, instance));
    all.push_back(std::move(z));
  }
  return all;
}

double ScoreUnchecked(const SparseNodeVector& z, std::span<const double> w) {
  double sum = 0.0;
  for (const NodeEntry& entry : z.entries) sum += entry.value * w[entry.index];
  return sum;
}

absl::StatusOr<double> Score(const SparseNodeVector& z, const WeightVector& w) {
  if (static_cast<size_t>(z.num_nodes) != w.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: node vector has m=", z.num_nodes,
                     ", weights have ", w.size()));
  }
  return ScoreUnchecked(z, w.values());
}

absl::StatusOr<std::vector<int64_t>> BaselineRank(
    const Forest& forest, std::span<const Instance> data) {
  const WeightVector uniform = WeightVector::Uniform(forest.num_nodes);
  std::vector<std::pair<double, int64_t>> scored;
  scored.reserve(data.size());
  for (const Instance& instance : data) {
    ASSIGN_OR_RETURN(const SparseNodeVector z, Traverse(forest, instance));
    scored.emplace_back(ScoreUnchecked(z, uniform.values()), instance.id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int64_t> order;
  order.reserve(scored.size());
  for (const auto& [score, id] : scored) order.push_back(id);
  return order;
}

absl::Status ValidateForest(const Forest& forest) {
  if (forest.trees.empty()) return absl::InvalidArgumentError("forest has no trees");
  if (forest.num_features < 1) {
    return absl::InvalidArgumentError("forest has no features");
  }
  std::vector<bool> seen(forest.num_nodes, false);
  int32_t counted = 0;
  for (size_t t = 0; t < forest.trees.size(); ++t) {
    const Tree& tree = forest.trees[t];
    const auto size = static_cast<int32_t>(tree.nodes.size());
    if (size == 0) return absl::InvalidArgumentError(absl::StrCat("tree ", t, " is empty"));
    if (tree.nodes[0].depth != 0) {
      return absl::InvalidArgumentError(absl::StrCat("tree ", t, " root depth is not 0"));
    }
    std::vector<int32_t> parent_refs(size, 0);
    for (int32_t i = 0; i < size; ++i) {
      const TreeNode& node = tree.nodes[i];
      const std::string where = absl::StrCat("tree ", t, " node ", i);
      if (node.global_index < 0 || node.global_index >= forest.num_nodes ||
          seen[node.global_index]) {
        return absl::InvalidArgumentError(absl::StrCat(where, ": bad global index"));
      }
      seen[node.global_index] = true;
      if (node.train_count < 1) {
        return absl::InvalidArgumentError(absl::StrCat(where, ": empty node"));
      }
      if (node.node_score != SchemeNodeScore(forest.scheme, node.is_leaf, node.depth)) {
        return absl::InvalidArgumentError(absl::StrCat(where, ": score does not match scheme"));
      }
      if (node.is_leaf) {
        if (node.left != -1 || node.right != -1) {
          return absl::InvalidArgumentError(absl::StrCat(where, ": leaf has children"));
        }
        continue;
      }
      if (node.split_feature < 0 || node.split_feature >= forest.num_features ||
          !std::isfinite(node.split_threshold)) {
        return absl::InvalidArgumentError(absl::StrCat(where, ": bad split"));
      }
      // Children must come after the parent so a walk always terminates.
      for (int32_t child : {node.left, node.right}) {
        if (child <= i || child >= size || tree.nodes[child].depth != node.depth + 1) {
          return absl::InvalidArgumentError(absl::StrCat(where, ": bad child link"));
        }
        ++parent_refs[child];
      }
      if (tree.nodes[node.left].train_count + tree.nodes[node.right].train_count !=
          node.train_count) {
        return absl::InvalidArgumentError(absl::StrCat(where, ": train counts do not add up"));
      }
    }
    for (int32_t i = 1; i < size; ++i) {
      if (parent_refs[i] != 1) {
        return absl::InvalidArgumentError(
            absl::StrCat("tree ", t, " node ", i, ": not referenced by exactly one parent"));
      }
    }
    counted += size;
  }
  if (counted != forest.num_nodes) {
    return absl::InvalidArgumentError("node count does not match m");
  }
  return absl::OkStatus();
}

}  // namespace ifaad
