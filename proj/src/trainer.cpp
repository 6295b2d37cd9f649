/*
 * Copyright 2026 The polk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "polk/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "polk/errors.hpp"

namespace polk {

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw UsageError("step size must be positive and finite");
  return StepSchedule(Kind::constant, eta);
}

StepSchedule StepSchedule::diminishing(double eta0) {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw UsageError("initial step size must be positive and finite");
  return StepSchedule(Kind::diminishing, eta0);
}

double schedule_eval(const StepSchedule& schedule, std::int64_t t) {
  if (t < 0) throw UsageError("schedule_eval: negative step index");
  if (schedule.kind() == StepSchedule::Kind::constant) return schedule.base();
  return schedule.base() / (static_cast<double>(t) + 1.0);
}

BudgetRule BudgetRule::matched_constant(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw UsageError("parsimony constant must be >= 0");
  return BudgetRule(Kind::matched_constant, k);
}

BudgetRule BudgetRule::matched_diminishing() { return BudgetRule(Kind::matched_diminishing, 0.0); }

BudgetRule BudgetRule::fixed(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw UsageError("budget must be >= 0");
  return BudgetRule(Kind::fixed, epsilon);
}

BudgetRule BudgetRule::dense() { return BudgetRule(Kind::dense, 0.0); }

double budget_eval(const BudgetRule& rule, double eta) {
  switch (rule.kind()) {
    case BudgetRule::Kind::matched_constant: return rule.parameter() * std::pow(eta, 1.5);
    case BudgetRule::Kind::matched_diminishing: return eta * eta;
    case BudgetRule::Kind::fixed: return rule.parameter();
    case BudgetRule::Kind::dense: return 0.0;
  }
  return 0.0;
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (checkpoint_every < 1) throw ConfigError("checkpoint interval must be >= 1");
  if (passes < 1) throw ConfigError("passes must be >= 1");
  if (max_model_order && *max_model_order < 0) throw ConfigError("max model order must be >= 0");
  // Both schedules are largest at t = 0.
  const double eta0 = schedule_eval(schedule, 0);
  if (lambda > 0.0 && eta0 * lambda >= 1.0) {
    throw ConfigError("step size " + format_double(eta0) + " violates eta < 1/lambda = " +
                      format_double(1.0 / lambda));
  }
}

KernelExpansion fsgd_candidate(const KernelExpansion& f, std::span<const Sample> batch, double eta,
                               double lambda, const LossKind& loss, std::optional<Index> cap) {
  if (batch.empty()) throw UsageError("fsgd_candidate: empty batch");
  if (!(eta > 0.0) || !(lambda >= 0.0)) throw UsageError("fsgd_candidate: need eta > 0 and lambda >= 0");
  if (eta * lambda >= 1.0) throw UsageError("fsgd_candidate: eta * lambda must be < 1");
  if (f.num_classes() != loss.num_classes()) throw UsageError("fsgd_candidate: loss and function disagree on C");

  const Index m = f.model_order();
  const Index l = static_cast<Index>(batch.size());
  if (cap && m + l > *cap) {
    throw CapacityError("model order " + std::to_string(m + l) + " would exceed the cap of " +
                        std::to_string(*cap));
  }

  Matrix points(f.dim(), m + l);
  points.leftCols(m) = f.dict().points();
  Matrix weights(m + l, f.num_classes());
  weights.topRows(m) = (1.0 - eta * lambda) * f.weights();
  const double scale = eta / static_cast<double>(l);
  for (Index i = 0; i < l; ++i) {
    const Sample& s = batch[static_cast<std::size_t>(i)];
    if (s.x.size() != f.dim()) throw UsageError("fsgd_candidate: sample dimension mismatch");
    points.col(m + i) = s.x;
    weights.row(m + i) = -scale * loss_and_grad(loss, evaluate(f, s.x), s.y).grad.transpose();
  }
  return KernelExpansion(f.kernel(), Dictionary(std::move(points)), std::move(weights));
}

PruneResult project_step(const KernelExpansion& candidate, double epsilon, bool dense, KompStrategy strategy) {
  if (!(epsilon >= 0.0)) throw UsageError("project_step: budget must be >= 0");
  if (dense) return PruneResult{candidate, PruneReport{}};
  return komp_prune(candidate, PruneBudget{epsilon, std::nullopt}, strategy);
}

Trainer::Trainer(TrainConfig config, Index dim)
    : config_(std::move(config)),
      state_{KernelExpansion::zero(config_.kernel, dim, config_.loss.num_classes()), 0, 0,
             std::mt19937_64(config_.seed)},
      kernel_bound_(config_.kernel.family() == KernelFamily::gaussian ? 1.0 : 0.0) {
  config_.validate();
}

StepOutcome Trainer::step(std::span<const Sample> batch, StepObserver* observer) {
  StepOutcome out;
  out.eta = schedule_eval(config_.schedule, state_.t);
  if (config_.lambda > 0.0 && out.eta * config_.lambda >= 1.0) {
    throw ConfigError("step size at t=" + std::to_string(state_.t) + " violates eta < 1/lambda");
  }
  out.epsilon = budget_eval(config_.budget, out.eta);
  const bool dense = config_.budget.is_dense();

  if (config_.kernel.family() != KernelFamily::gaussian) {
    for (const Sample& s : batch) {
      kernel_bound_ = std::max(kernel_bound_, std::sqrt(std::max(0.0, config_.kernel(s.x, s.x))));
    }
  }

  KernelExpansion candidate = fsgd_candidate(state_.f, batch, out.eta, config_.lambda, config_.loss,
                                             dense ? config_.max_model_order : std::nullopt);
  PruneResult projected = project_step(candidate, out.epsilon, dense, config_.komp);
  if (config_.max_model_order && projected.f.model_order() > *config_.max_model_order) {
    throw CapacityError("model order " + std::to_string(projected.f.model_order()) + " exceeds the cap of " +
                        std::to_string(*config_.max_model_order) + " after projection at t=" +
                        std::to_string(state_.t));
  }
  out.bias = projected.report.final_error / out.eta;

  if (observer != nullptr) {
    observer->on_step(StepView{state_.t, out.eta, out.epsilon, state_.f, candidate, projected.f, batch,
                               projected.report});
  }
  state_.f = std::move(projected.f);
  ++state_.t;
  state_.samples_seen += static_cast<std::int64_t>(batch.size());
  return out;
}

namespace {

void check_labels(const Dataset& data, const LossKind& loss, const char* what) {
  for (int y : data.labels) {
    if (!loss.valid_label(y)) {
      throw UsageError(std::string(what) + " label " + std::to_string(y) + " is not valid for " +
                       std::string(to_string(loss.family())) + " with " + std::to_string(loss.num_classes()) +
                       " classes");
    }
  }
}

struct Evaluation {
  double risk = 0.0;
  double error_pct = 0.0;
};

Evaluation score(const KernelExpansion& f, const Dictionary& points, const Dataset& data, const LossKind& loss,
                 double lambda) {
  const Matrix scores = gram(f.kernel(), points, f.dict()) * f.weights();
  double total = 0.0;
  Index wrong = 0;
  for (Index n = 0; n < data.size(); ++n) {
    const Vector s = scores.row(n).transpose();
    const int y = data.labels[static_cast<std::size_t>(n)];
    total += loss_and_grad(loss, s, y).value;
    if (predict(loss, s) != y) ++wrong;
  }
  const double nn = static_cast<double>(data.size());
  const double norm = hilbert_norm(f);
  return {total / nn + 0.5 * lambda * norm * norm, 100.0 * static_cast<double>(wrong) / nn};
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& data, const Dataset* eval, StepObserver* observer) {
  config.validate();
  if (data.size() == 0) throw UsageError("training data is empty");
  check_labels(data, config.loss, "training");
  const Dataset& target = eval != nullptr ? *eval : data;
  if (target.size() == 0) throw UsageError("evaluation data is empty");
  if (target.dim() != data.dim()) throw UsageError("evaluation data has a different dimension");
  check_labels(target, config.loss, "evaluation");

  const auto start = std::chrono::steady_clock::now();
  Trainer trainer(config, data.dim());
  const Dictionary eval_points(target.features.transpose());

  std::vector<Index> stream;
  stream.reserve(static_cast<std::size_t>(data.size()) * static_cast<std::size_t>(config.passes));
  std::mt19937_64 order_rng(config.seed);
  for (int pass = 0; pass < config.passes; ++pass) {
    std::vector<Index> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), Index{0});
    if (config.shuffle) std::shuffle(order.begin(), order.end(), order_rng);
    stream.insert(stream.end(), order.begin(), order.end());
  }

  const double lipschitz = lipschitz_constant(config.loss);
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  std::vector<MetricsRecord> records;
  std::vector<Sample> samples;
  for (std::size_t begin = 0; begin < stream.size(); begin += batch) {
    const std::size_t end = std::min(stream.size(), begin + batch);
    samples.clear();
    for (std::size_t i = begin; i < end; ++i) samples.push_back(data.sample(stream[i]));
    const StepOutcome outcome = trainer.step(samples, observer);

    const TrainerState& st = trainer.state();
    if (st.t % config.checkpoint_every != 0 && end != stream.size()) continue;
    const Evaluation ev = score(st.f, eval_points, target, config.loss, config.lambda);
    MetricsRecord rec;
    rec.t = st.t;
    rec.samples_seen = st.samples_seen;
    rec.eta = outcome.eta;
    rec.epsilon = outcome.epsilon;
    rec.model_order = st.f.model_order();
    rec.empirical_risk = ev.risk;
    rec.test_error_pct = ev.error_pct;
    rec.bias = outcome.bias;
    rec.bias_bound = outcome.epsilon / outcome.eta;
    rec.iterate_norm = hilbert_norm(st.f);
    rec.norm_bound = config.lambda > 0.0 ? lipschitz * trainer.kernel_bound() / config.lambda
                                         : std::numeric_limits<double>::quiet_NaN();
    if (config.timing) {
      rec.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    records.push_back(rec);
    update_trailing(records);
  }
  return TrainResult{trainer.state().f, std::move(records)};
}

}  // namespace polk
