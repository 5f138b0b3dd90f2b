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

#ifndef IFAAD_WEIGHTS_H_
#define IFAAD_WEIGHTS_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ifaad {

// Learnable per-node weights, one entry per forest node.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> values) : values_(std::move(values)) {}

  // The prior 1/sqrt(m) in every coordinate. Unit norm.
  static WeightVector Uniform(size_t num_nodes) {
    return WeightVector(std::vector<double>(
        num_nodes, 1.0 / std::sqrt(static_cast<double>(num_nodes))));
  }

  size_t size() const { return values_.size(); }
  double operator[](size_t i) const { return values_[i]; }
  double& operator[](size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  double Norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
  }

  bool AllFinite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  // Scales to unit L2 norm. A zero vector is left unchanged.
  void Normalize() {
    const double norm = Norm();
    if (norm == 0.0) return;
    for (double& v : values_) v /= norm;
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace ifaad

#endif  // IFAAD_WEIGHTS_H_
