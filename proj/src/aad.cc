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

#include "ifaad/aad.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ifaad/status_macros.h"

namespace ifaad {

namespace {

// Armijo sufficient-decrease constant for the backtracking line search.
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;

absl::Status CheckDims(const SparseNodeVector& z, const WeightVector& w) {
  if (static_cast<size_t>(z.num_nodes) != w.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: node vector has m=", z.num_nodes,
                     ", weights have ", w.size()));
  }
  return absl::OkStatus();
}

absl::Status CheckProblem(const WeightVector& w, const LabeledSet& labeled,
                          const QuantileAnchor& anchor) {
  if (labeled.empty()) return absl::FailedPreconditionError("no feedback yet");
  if (w.size() == 0) return absl::InvalidArgumentError("empty weight vector");
  RETURN_IF_ERROR(CheckDims(anchor.anchor_vector, w));
  for (const auto* group : {&labeled.anomalies, &labeled.nominals}) {
    for (const LabeledInstance& item : *group) RETURN_IF_ERROR(CheckDims(item.z, w));
  }
  if (!std::isfinite(anchor.anchor_score)) {
    return absl::InvalidArgumentError("anchor score is not finite");
  }
  return absl::OkStatus();
}

// The five objective terms, kept apart for diagnostics.
struct ObjectiveTerms {
  double anomaly_hinge = 0.0;
  double nominal_hinge = 0.0;
  double anomaly_anchor = 0.0;
  double nominal_anchor = 0.0;
  double regularizer = 0.0;

  double Total() const {
    return anomaly_hinge + nominal_hinge + anomaly_anchor + nominal_anchor +
           regularizer;
  }
};

ObjectiveTerms EvaluateTerms(std::span<const double> w,
                             const LabeledSet& labeled,
                             const QuantileAnchor& anchor,
                             const AadConfig& config) {
  const double q = anchor.anchor_score;
  const double anchor_now = ScoreUnchecked(anchor.anchor_vector, w);
  ObjectiveTerms terms;
  if (!labeled.anomalies.empty()) {
    double hinge = 0.0;
    double soft = 0.0;
    for (const LabeledInstance& item : labeled.anomalies) {
      const double s = ScoreUnchecked(item.z, w);
      hinge += HingeLossAt(q, s, Label::kAnomaly);
      soft += HingeLossAt(anchor_now, s, Label::kAnomaly);
    }
    const auto count = static_cast<double>(labeled.anomalies.size());
    terms.anomaly_hinge = config.c_a / count * hinge;
    terms.anomaly_anchor = config.c_xi / count * soft;
  }
  if (!labeled.nominals.empty()) {
    double hinge = 0.0;
    double soft = 0.0;
    for (const LabeledInstance& item : labeled.nominals) {
      const double s = ScoreUnchecked(item.z, w);
      hinge += HingeLossAt(q, s, Label::kNominal);
      soft += HingeLossAt(anchor_now, s, Label::kNominal);
    }
    const auto count = static_cast<double>(labeled.nominals.size());
    terms.nominal_hinge = hinge / count;
    terms.nominal_anchor = config.c_xi / count * soft;
  }
  const double prior = 1.0 / std::sqrt(static_cast<double>(w.size()));
  for (double v : w) terms.regularizer += (v - prior) * (v - prior);
  return terms;
}

void AddScaled(std::vector<double>& g, const SparseNodeVector& z, double scale) {
  for (const NodeEntry& entry : z.entries) g[entry.index] += scale * entry.value;
}

std::vector<double> GradientUnchecked(std::span<const double> w,
                                      const LabeledSet& labeled,
                                      const QuantileAnchor& anchor,
                                      const AadConfig& config) {
  const double prior = 1.0 / std::sqrt(static_cast<double>(w.size()));
  std::vector<double> g(w.size());
  for (size_t i = 0; i < w.size(); ++i) g[i] = 2.0 * (w[i] - prior);

  const double q = anchor.anchor_score;
  const double anchor_now = ScoreUnchecked(anchor.anchor_vector, w);
  // Net coefficient on the anchor vector from the moving-threshold terms.
  double anchor_coeff = 0.0;

  if (!labeled.anomalies.empty()) {
    const auto count = static_cast<double>(labeled.anomalies.size());
    for (const LabeledInstance& item : labeled.anomalies) {
      const double s = ScoreUnchecked(item.z, w);
      double coeff = 0.0;
      if (s < q) coeff -= config.c_a / count;
      if (s < anchor_now) {
        coeff -= config.c_xi / count;
        anchor_coeff += config.c_xi / count;
      }
      if (coeff != 0.0) AddScaled(g, item.z, coeff);
    }
  }
  if (!labeled.nominals.empty()) {
    const auto count = static_cast<double>(labeled.nominals.size());
    for (const LabeledInstance& item : labeled.nominals) {
      const double s = ScoreUnchecked(item.z, w);
      double coeff = 0.0;
      if (s > q) coeff += 1.0 / count;
      if (s > anchor_now) {
        coeff += config.c_xi / count;
        anchor_coeff -= config.c_xi / count;
      }
      if (coeff != 0.0) AddScaled(g, item.z, coeff);
    }
  }
  if (anchor_coeff != 0.0) AddScaled(g, anchor.anchor_vector, anchor_coeff);
  return g;
}

}  // namespace

std::string_view LabelName(Label label) {
  return label == Label::kAnomaly ? "anomaly" : "nominal";
}

std::optional<Label> ParseLabel(std::string_view name) {
  if (name == "anomaly") return Label::kAnomaly;
  if (name == "nominal") return Label::kNominal;
  return std::nullopt;
}

bool LabeledSet::Contains(int64_t id) const {
  auto has = [id](const std::vector<LabeledInstance>& group) {
    return std::any_of(group.begin(), group.end(),
                       [id](const LabeledInstance& item) { return item.id == id; });
  };
  return has(anomalies) || has(nominals);
}

absl::Status AadConfig::Validate() const {
  if (!(tau > 0.0 && tau < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("tau must be in (0, 1), got ", tau));
  }
  if (!(c_a >= 1.0) || !std::isfinite(c_a)) {
    return absl::InvalidArgumentError(absl::StrCat("c_a must be >= 1, got ", c_a));
  }
  if (!(c_xi >= 0.0) || !std::isfinite(c_xi)) {
    return absl::InvalidArgumentError(absl::StrCat("c_xi must be >= 0, got ", c_xi));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    return absl::InvalidArgumentError("learning_rate must be positive");
  }
  if (max_steps < 1) return absl::InvalidArgumentError("max_steps must be positive");
  if (!(convergence_tol > 0.0)) {
    return absl::InvalidArgumentError("convergence_tol must be positive");
  }
  if (budget < 0) return absl::InvalidArgumentError("budget must be non-negative");
  return absl::OkStatus();
}

double HingeLossAt(double q, double score, Label y) {
  if (y == Label::kAnomaly) return score >= q ? 0.0 : q - score;
  return score < q ? 0.0 : score - q;
}

absl::StatusOr<double> HingeLoss(double q, const WeightVector& w,
                                 const SparseNodeVector& z, Label y) {
  RETURN_IF_ERROR(CheckDims(z, w));
  if (!std::isfinite(q)) return absl::InvalidArgumentError("q must be finite");
  return HingeLossAt(q, ScoreUnchecked(z, w.values()), y);
}

absl::StatusOr<double> Objective(const WeightVector& w,
                                 const LabeledSet& labeled,
                                 const QuantileAnchor& anchor,
                                 const AadConfig& config) {
  RETURN_IF_ERROR(CheckProblem(w, labeled, anchor));
  return EvaluateTerms(w.values(), labeled, anchor, config).Total();
}

absl::StatusOr<std::vector<double>> ObjectiveGradient(
    const WeightVector& w, const LabeledSet& labeled,
    const QuantileAnchor& anchor, const AadConfig& config) {
  RETURN_IF_ERROR(CheckProblem(w, labeled, anchor));
  return GradientUnchecked(w.values(), labeled, anchor, config);
}

absl::StatusOr<WeightUpdate> UpdateWeights(const FeedbackState& state,
                                           const QuantileAnchor& anchor,
                                           const AadConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckProblem(state.weights, state.labeled, anchor));

  std::vector<double> w(state.weights.values().begin(), state.weights.values().end());
  std::vector<double> candidate(w.size());
  ObjectiveTerms terms = EvaluateTerms(w, state.labeled, anchor, config);
  double f = terms.Total();
  if (!std::isfinite(f)) {
    return absl::InternalError(absl::StrFormat(
        "non-finite objective at start: hinge_a=%g hinge_n=%g anchor_a=%g "
        "anchor_n=%g reg=%g",
        terms.anomaly_hinge, terms.nominal_hinge, terms.anomaly_anchor,
        terms.nominal_anchor, terms.regularizer));
  }

  WeightUpdate update;
  update.objective_trace.push_back(f);
  double step = config.learning_rate;
  for (int32_t iter = 0; iter < config.max_steps; ++iter) {
    const std::vector<double> g = GradientUnchecked(w, state.labeled, anchor, config);
    const double g2 = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
    if (g2 == 0.0) break;

    bool accepted = false;
    double f_new = f;
    while (step >= kMinStep) {
      for (size_t i = 0; i < w.size(); ++i) candidate[i] = w[i] - step * g[i];
      terms = EvaluateTerms(candidate, state.labeled, anchor, config);
      f_new = terms.Total();
      if (!std::isfinite(f_new)) {
        return absl::InternalError(absl::StrFormat(
            "non-finite objective at step %d (step size %g, |g|^2=%g): "
            "hinge_a=%g hinge_n=%g anchor_a=%g anchor_n=%g reg=%g",
            iter, step, g2, terms.anomaly_hinge, terms.nominal_hinge,
            terms.anomaly_anchor, terms.nominal_anchor, terms.regularizer));
      }
      if (f_new <= f - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double decrease = f - f_new;
    w.swap(candidate);
    f = f_new;
    update.objective_trace.push_back(f);
    ++update.steps;
    if (decrease <= config.convergence_tol * std::max(std::abs(f + decrease), 1e-12)) {
      break;
    }
    step = std::min(2.0 * step, config.learning_rate);
  }

  update.weights = WeightVector(std::move(w));
  update.weights.Normalize();
  if (!update.weights.AllFinite() || update.weights.Norm() == 0.0) {
    return absl::InternalError("weight update produced a degenerate vector");
  }
  return update;
}

std::vector<double> ScoreAll(std::span<const SparseNodeVector> all_z,
                             const WeightVector& w) {
  std::vector<double> scores(all_z.size());
  for (size_t i = 0; i < all_z.size(); ++i) {
    scores[i] = ScoreUnchecked(all_z[i], w.values());
  }
  return scores;
}

absl::StatusOr<QuantileAnchor> ComputeQuantileAnchor(
    std::span<const SparseNodeVector> all_z, const WeightVector& w,
    double tau) {
  if (all_z.empty()) return absl::InvalidArgumentError("empty dataset");
  if (!(tau > 0.0 && tau < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("tau must be in (0, 1), got ", tau));
  }
  for (const SparseNodeVector& z : all_z) RETURN_IF_ERROR(CheckDims(z, w));

  const auto n = static_cast<int64_t>(all_z.size());
  // The small slack keeps e.g. 0.03 * 100 at rank 3 despite rounding.
  int64_t rank = static_cast<int64_t>(std::ceil(tau * static_cast<double>(n) - 1e-9));
  rank = std::clamp<int64_t>(rank, 1, n);

  const std::vector<double> scores = ScoreAll(all_z, w);
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + (rank - 1), order.end(),
                   [&](int64_t a, int64_t b) {
                     if (scores[a] != scores[b]) return scores[a] > scores[b];
                     return a < b;
                   });
  const int64_t id = order[rank - 1];

  QuantileAnchor anchor;
  anchor.tau = tau;
  anchor.instance_id = id;
  anchor.anchor_vector = all_z[id];
  anchor.anchor_score = scores[id];
  return anchor;
}

absl::StatusOr<int64_t> NextQuery(std::span<const SparseNodeVector> all_z,
                                  const WeightVector& w,
                                  const LabeledSet& already_labeled) {
  std::vector<bool> labeled(all_z.size(), false);
  for (const auto* group : {&already_labeled.anomalies, &already_labeled.nominals}) {
    for (const LabeledInstance& item : *group) {
      if (item.id >= 0 && static_cast<size_t>(item.id) < labeled.size()) {
        labeled[item.id] = true;
      }
    }
  }
  int64_t best = -1;
  double best_score = 0.0;
  for (size_t i = 0; i < all_z.size(); ++i) {
    if (labeled[i]) continue;
    RETURN_IF_ERROR(CheckDims(all_z[i], w));
    const double s = ScoreUnchecked(all_z[i], w.values());
    // Strict comparison keeps the smallest id among ties.
    if (best < 0 || s > best_score) {
      best = static_cast<int64_t>(i);
      best_score = s;
    }
  }
  if (best < 0) return absl::FailedPreconditionError("budget exhausted dataset");
  return best;
}

FeedbackLearner::FeedbackLearner(std::span<const SparseNodeVector> all_z,
                                 AadConfig config)
    : all_z_(all_z), config_(config) {
  state_.weights = WeightVector::Uniform(all_z.empty() ? 0 : all_z.front().num_nodes);
}

absl::StatusOr<FeedbackLearner> FeedbackLearner::Resume(
    std::span<const SparseNodeVector> all_z, AadConfig config,
    std::span<const QueryRecord> history, WeightVector weights) {
  RETURN_IF_ERROR(config.Validate());
  FeedbackLearner learner(all_z, config);
  if (weights.size() != learner.state_.weights.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "restored weights have ", weights.size(), " entries, forest has ",
        learner.state_.weights.size()));
  }
  if (!weights.AllFinite() || std::abs(weights.Norm() - 1.0) > 1e-9) {
    return absl::InvalidArgumentError("restored weights are not a finite unit vector");
  }
  if (static_cast<int64_t>(history.size()) > config.budget) {
    return absl::InvalidArgumentError("restored history is longer than the budget");
  }
  for (const QueryRecord& record : history) {
    if (record.id < 0 || record.id >= learner.num_instances()) {
      return absl::InvalidArgumentError(
          absl::StrCat("restored history references unknown instance ", record.id));
    }
    if (learner.state_.labeled.Contains(record.id)) {
      return absl::InvalidArgumentError(
          absl::StrCat("restored history labels instance ", record.id, " twice"));
    }
    auto& group = record.label == Label::kAnomaly ? learner.state_.labeled.anomalies
                                                  : learner.state_.labeled.nominals;
    group.push_back({record.id, all_z[record.id]});
    learner.state_.query_history.push_back(record);
  }
  learner.state_.iteration = static_cast<int32_t>(history.size());
  learner.state_.weights = std::move(weights);
  return learner;
}

absl::StatusOr<int64_t> FeedbackLearner::NextQuery() const {
  if (state_.iteration >= config_.budget) {
    return absl::FailedPreconditionError("budget exhausted");
  }
  return ifaad::NextQuery(all_z_, state_.weights, state_.labeled);
}

bool FeedbackLearner::exhausted() const {
  return state_.iteration >= config_.budget ||
         state_.labeled.size() >= all_z_.size();
}

absl::StatusOr<WeightUpdate> FeedbackLearner::Incorporate(int64_t id, Label label) {
  if (state_.iteration >= config_.budget) {
    return absl::FailedPreconditionError("budget exhausted");
  }
  if (id < 0 || id >= num_instances()) {
    return absl::OutOfRangeError(absl::StrCat("unknown instance ", id));
  }
  if (label != Label::kAnomaly && label != Label::kNominal) {
    return absl::InvalidArgumentError("invalid label");
  }
  if (state_.labeled.Contains(id)) {
    return absl::AlreadyExistsError(absl::StrCat("instance ", id, " already labeled"));
  }
  ASSIGN_OR_RETURN(const QuantileAnchor anchor,
                   ComputeQuantileAnchor(all_z_, state_.weights, config_.tau));

  FeedbackState next = state_;
  auto& group = label == Label::kAnomaly ? next.labeled.anomalies : next.labeled.nominals;
  group.push_back({id, all_z_[id]});
  ASSIGN_OR_RETURN(WeightUpdate update, UpdateWeights(next, anchor, config_));

  next.weights = update.weights;
  next.query_history.push_back({id, label});
  ++next.iteration;
  state_ = std::move(next);
  return update;
}

absl::StatusOr<LoopResult> RunFeedbackLoop(std::span<const SparseNodeVector> all_z,
                                           const LabelOracle& oracle,
                                           const AadConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  if (all_z.empty()) return absl::InvalidArgumentError("empty dataset");
  if (static_cast<size_t>(config.budget) > all_z.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "budget ", config.budget, " exceeds dataset size ", all_z.size()));
  }
  FeedbackLearner learner(all_z, config);
  LoopResult result;
  while (learner.state().iteration < config.budget) {
    ASSIGN_OR_RETURN(const int64_t id, learner.NextQuery());
    ASSIGN_OR_RETURN(const Label label, oracle(id));
    if (label != Label::kAnomaly && label != Label::kNominal) {
      return absl::InvalidArgumentError(
          absl::StrCat("oracle returned an invalid label for instance ", id));
    }
    ASSIGN_OR_RETURN(WeightUpdate update, learner.Incorporate(id, label));
    result.updates.push_back(std::move(update));
  }
  result.state = learner.state();
  return result;
}

absl::StatusOr<LoopResult> RunFeedbackLoop(const Forest& forest,
                                           std::span<const Instance> data,
                                           const LabelOracle& oracle,
                                           const AadConfig& config) {
  ASSIGN_OR_RETURN(const std::vector<SparseNodeVector> all_z, TraverseAll(forest, data));
  return RunFeedbackLoop(all_z, oracle, config);
}

}  // namespace ifaad
