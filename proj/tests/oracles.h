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

// Reference computations for tests. Nothing here calls into the library's
// traversal, scoring or objective code: trees are read back from the raw
// serialized bytes, and the objective is evaluated densely term by term.

#ifndef IFAAD_TESTS_ORACLES_H_
#define IFAAD_TESTS_ORACLES_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

namespace ifaad::oracle {

struct RawNode {
  bool leaf = true;
  int32_t feature = -1;
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
};

// Minimal decoder for the forest byte stream; trusts its input.
inline std::vector<std::vector<RawNode>> DecodeTrees(const std::string& bytes) {
  size_t pos = 8 + 4 + 1 + 8 + 4 + 4;  // magic .. features
  auto u32 = [&] {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(bytes[pos++])) << (8 * i);
    return v;
  };
  auto u64 = [&] {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(bytes[pos++])) << (8 * i);
    return v;
  };
  const uint32_t num_trees = u32();
  u32();  // node count
  std::vector<std::vector<RawNode>> trees(num_trees);
  for (auto& tree : trees) {
    tree.resize(u32());
    for (RawNode& node : tree) {
      u32();  // global index
      node.leaf = bytes[pos++] == 1;
      node.feature = static_cast<int32_t>(u32());
      node.threshold = std::bit_cast<double>(u64());
      node.left = static_cast<int32_t>(u32());
      node.right = static_cast<int32_t>(u32());
      u32();  // depth
      u32();  // train count
      u64();  // score
    }
  }
  return trees;
}

// Edges from the root to the leaf that `x` reaches.
inline int LeafDepth(const std::vector<RawNode>& tree, int node,
                     const std::vector<double>& x) {
  if (tree[node].leaf) return 0;
  const RawNode& n = tree[node];
  return 1 + LeafDepth(tree, x[n.feature] <= n.threshold ? n.left : n.right, x);
}

// Mean number of nodes on the root-to-leaf paths of `x`.
inline double AveragePathNodes(const std::vector<std::vector<RawNode>>& trees,
                               const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& tree : trees) total += LeafDepth(tree, 0, x) + 1;
  return total / static_cast<double>(trees.size());
}

// Ranking by shorter average path first; ties by position.
inline std::vector<int64_t> RankByPathLength(
    const std::vector<std::vector<RawNode>>& trees,
    const std::vector<std::vector<double>>& points) {
  std::vector<int64_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> total(points.size());
  // Integer node counts avoid any rounding in the comparison.
  for (size_t i = 0; i < points.size(); ++i) {
    for (const auto& tree : trees) total[i] += LeafDepth(tree, 0, points[i]) + 1;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int64_t a, int64_t b) { return total[a] < total[b]; });
  return order;
}

// Dense straight-line evaluation of the weight-learning objective.
struct DenseProblem {
  std::vector<std::vector<double>> anomalies;
  std::vector<std::vector<double>> nominals;
  std::vector<double> anchor;
  double anchor_score = 0.0;
  double c_a = 100.0;
  double c_xi = 0.001;
};

template <typename Real>
Real Dot(const std::vector<double>& a, const std::vector<Real>& w) {
  Real s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += static_cast<Real>(a[i]) * w[i];
  return s;
}

template <typename Real>
Real DenseObjective(const DenseProblem& p, const std::vector<Real>& w) {
  const Real q = p.anchor_score;
  const Real moving = Dot(p.anchor, w);
  Real term1 = 0, term2 = 0, term3 = 0, term4 = 0, reg = 0;
  for (const auto& z : p.anomalies) {
    const Real s = Dot(z, w);
    if (s < q) term1 += q - s;
    if (s < moving) term3 += moving - s;
  }
  for (const auto& z : p.nominals) {
    const Real s = Dot(z, w);
    if (s >= q) term2 += s - q;
    if (s >= moving) term4 += s - moving;
  }
  const Real na = static_cast<Real>(p.anomalies.size());
  const Real nn = static_cast<Real>(p.nominals.size());
  Real total = 0;
  if (!p.anomalies.empty()) total += static_cast<Real>(p.c_a) / na * term1;
  if (!p.nominals.empty()) total += term2 / nn;
  if (!p.anomalies.empty()) total += static_cast<Real>(p.c_xi) / na * term3;
  if (!p.nominals.empty()) total += static_cast<Real>(p.c_xi) / nn * term4;
  const Real prior = 1 / std::sqrt(static_cast<Real>(w.size()));
  for (const Real v : w) reg += (v - prior) * (v - prior);
  return total + reg;
}

// Central differences of DenseObjective in extended precision.
inline std::vector<double> FiniteDifferenceGradient(const DenseProblem& p,
                                                    const std::vector<double>& w,
                                                    double step) {
  std::vector<long double> x(w.begin(), w.end());
  std::vector<double> g(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const long double saved = x[i];
    x[i] = saved + step;
    const long double up = DenseObjective(p, x);
    x[i] = saved - step;
    const long double down = DenseObjective(p, x);
    x[i] = saved;
    g[i] = static_cast<double>((up - down) / (2.0L * step));
  }
  return g;
}

}  // namespace ifaad::oracle

#endif  // IFAAD_TESTS_ORACLES_H_
