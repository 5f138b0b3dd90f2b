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

// Active anomaly discovery over forest node weights.
//
// The analyst is shown the highest-scoring unlabeled instance and answers
// anomaly or nominal. After each answer the node weights are re-fit by
// minimizing
//
//   C_A/|H_A| * sum_{H_A} l(q, w; z)          anomalies above the anchor score
// + 1/|H_N|   * sum_{H_N} l(q, w; z)          nominals below the anchor score
// + C_xi/|H_A| * sum_{H_A} l(z_tau.w, w; z)   same, against the anchor vector
// + C_xi/|H_N| * sum_{H_N} l(z_tau.w, w; z)
// + |w - w_p|^2                               stay near the unsupervised prior
//
// where l is the hinge loss below, z_tau is the instance at rank
// ceil(tau * n) under the previous weights, q its previous score, and w_p the
// uniform unit vector. Sums over an empty label set contribute zero.

#ifndef IFAAD_AAD_H_
#define IFAAD_AAD_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ifaad/forest.h"
#include "ifaad/weights.h"

namespace ifaad {

enum class Label : uint8_t { kAnomaly, kNominal };

std::string_view LabelName(Label label);
std::optional<Label> ParseLabel(std::string_view name);

struct LabeledInstance {
  int64_t id = 0;
  SparseNodeVector z;
};

struct LabeledSet {
  std::vector<LabeledInstance> anomalies;
  std::vector<LabeledInstance> nominals;

  bool empty() const { return anomalies.empty() && nominals.empty(); }
  size_t size() const { return anomalies.size() + nominals.size(); }
  bool Contains(int64_t id) const;
};

// The instance at descending-score rank max(1, ceil(tau * n)).
struct QuantileAnchor {
  double tau = 0.0;
  int64_t instance_id = -1;
  SparseNodeVector anchor_vector;
  // Score of anchor_vector under the weights used for ranking.
  double anchor_score = 0.0;
};

struct AadConfig {
  double tau = 0.03;
  double c_a = 100.0;
  double c_xi = 0.001;
  // Initial (and maximum) gradient step; backtracking halves it as needed.
  double learning_rate = 0.01;
  int32_t max_steps = 1000;
  // Stop when the relative objective decrease of an accepted step is below
  // this.
  double convergence_tol = 1e-6;
  int32_t budget = 60;

  absl::Status Validate() const;
};

struct QueryRecord {
  int64_t id = 0;
  Label label = Label::kNominal;

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

struct FeedbackState {
  WeightVector weights;
  LabeledSet labeled;
  int32_t iteration = 0;
  std::vector<QueryRecord> query_history;
};

// Hinge loss: zero when the score sits on the label's side of q (anomalies
// at or above, nominals below), otherwise the distance to q.
double HingeLossAt(double q, double score, Label y);

absl::StatusOr<double> HingeLoss(double q, const WeightVector& w,
                                 const SparseNodeVector& z, Label y);

absl::StatusOr<double> Objective(const WeightVector& w,
                                 const LabeledSet& labeled,
                                 const QuantileAnchor& anchor,
                                 const AadConfig& config);

// A subgradient of Objective. At a hinge kink the inactive side (zero) is
// used. The anchor vector is held fixed but the threshold z_tau.w is
// differentiated through.
absl::StatusOr<std::vector<double>> ObjectiveGradient(
    const WeightVector& w, const LabeledSet& labeled,
    const QuantileAnchor& anchor, const AadConfig& config);

struct WeightUpdate {
  // Unit-norm result.
  WeightVector weights;
  // Objective value at the start and after every accepted step, before the
  // final normalization.
  std::vector<double> objective_trace;
  int32_t steps = 0;
};

// Gradient descent with backtracking from state.weights, then L2
// normalization.
absl::StatusOr<WeightUpdate> UpdateWeights(const FeedbackState& state,
                                           const QuantileAnchor& anchor,
                                           const AadConfig& config);

absl::StatusOr<QuantileAnchor> ComputeQuantileAnchor(
    std::span<const SparseNodeVector> all_z, const WeightVector& w,
    double tau);

// Highest-scoring id not in `already_labeled`; ties go to the smaller id.
// Ids are positions in all_z.
absl::StatusOr<int64_t> NextQuery(std::span<const SparseNodeVector> all_z,
                                  const WeightVector& w,
                                  const LabeledSet& already_labeled);

// Scores of every instance, by position.
std::vector<double> ScoreAll(std::span<const SparseNodeVector> all_z,
                             const WeightVector& w);

using LabelOracle = std::function<absl::StatusOr<Label>(int64_t id)>;

// Step-at-a-time driver for the query/label/update loop. Holds a view of the
// node vectors; the caller keeps them alive.
class FeedbackLearner {
 public:
  FeedbackLearner(std::span<const SparseNodeVector> all_z, AadConfig config);

  // Restores a loop from a persisted history and weights.
  static absl::StatusOr<FeedbackLearner> Resume(
      std::span<const SparseNodeVector> all_z, AadConfig config,
      std::span<const QueryRecord> history, WeightVector weights);

  // Current best unlabeled instance.
  absl::StatusOr<int64_t> NextQuery() const;

  // Records the label of `id` and re-fits the weights. The anchor comes from
  // the weights in effect before this call.
  absl::StatusOr<WeightUpdate> Incorporate(int64_t id, Label label);

  bool exhausted() const;
  const FeedbackState& state() const { return state_; }
  const AadConfig& config() const { return config_; }
  int64_t num_instances() const { return static_cast<int64_t>(all_z_.size()); }

 private:
  std::span<const SparseNodeVector> all_z_;
  AadConfig config_;
  FeedbackState state_;
};

struct LoopResult {
  FeedbackState state;
  std::vector<WeightUpdate> updates;
};

// Runs config.budget iterations against `oracle`.
absl::StatusOr<LoopResult> RunFeedbackLoop(
    std::span<const SparseNodeVector> all_z, const LabelOracle& oracle,
    const AadConfig& config);

absl::StatusOr<LoopResult> RunFeedbackLoop(const Forest& forest,
                                           std::span<const Instance> data,
                                           const LabelOracle& oracle,
                                           const AadConfig& config);

}  // namespace ifaad

#endif  // IFAAD_AAD_H_
