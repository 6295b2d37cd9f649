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

#ifndef POLK_TRAINER_HPP
#define POLK_TRAINER_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "polk/dataset.hpp"
#include "polk/kernel.hpp"
#include "polk/komp.hpp"
#include "polk/losses.hpp"
#include "polk/metrics.hpp"

namespace polk {

class StepSchedule {
 public:
  enum class Kind { constant, diminishing };

  static StepSchedule constant(double eta);
  /// eta_t = eta0 / (t + 1).
  static StepSchedule diminishing(double eta0);

  Kind kind() const noexcept { return kind_; }
  double base() const noexcept { return base_; }

 private:
  StepSchedule(Kind kind, double base) : kind_(kind), base_(base) {}
  Kind kind_;
  double base_;
};

double schedule_eval(const StepSchedule& schedule, std::int64_t t);

class BudgetRule {
 public:
  enum class Kind { matched_constant, matched_diminishing, fixed, dense };

  /// epsilon = K * eta^(3/2).
  static BudgetRule matched_constant(double k);
  /// epsilon = eta^2.
  static BudgetRule matched_diminishing();
  static BudgetRule fixed(double epsilon);
  /// No pruning at all.
  static BudgetRule dense();

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  bool is_dense() const noexcept { return kind_ == Kind::dense; }

 private:
  BudgetRule(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}
  Kind kind_;
  double parameter_;
};

double budget_eval(const BudgetRule& rule, double eta);

struct TrainConfig {
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  LossKind loss = LossKind::multi_hinge(2);
  double lambda = 0.0;
  StepSchedule schedule = StepSchedule::constant(0.1);
  BudgetRule budget = BudgetRule::dense();
  Index batch_size = 1;
  std::optional<Index> max_model_order;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 10;
  int passes = 1;
  /// Reorder the samples of every pass with an RNG seeded by `seed`.
  bool shuffle = false;
  KompStrategy komp = KompStrategy::fast;
  /// Record elapsed_seconds in the metrics (makes the trace nondeterministic).
  bool timing = false;

  /// ConfigError for bad values, including eta_0 * lambda >= 1.
  void validate() const;
};

/// f_t scaled by (1 - eta*lambda) with one new atom per batch point carrying
/// -(eta/L) * loss gradient at f_t. CapacityError if `cap` is set and the
/// candidate would exceed it.
KernelExpansion fsgd_candidate(const KernelExpansion& f, std::span<const Sample> batch, double eta,
                               double lambda, const LossKind& loss, std::optional<Index> cap = std::nullopt);

/// KOMP with budget epsilon, or the candidate itself when `dense`.
PruneResult project_step(const KernelExpansion& candidate, double epsilon, bool dense,
                         KompStrategy strategy = KompStrategy::fast);

struct StepView {
  std::int64_t t;
  double eta;
  double epsilon;
  const KernelExpansion& before;
  const KernelExpansion& candidate;
  const KernelExpansion& after;
  std::span<const Sample> batch;
  const PruneReport& report;
};

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_step(const StepView& step) = 0;
};

struct TrainerState {
  KernelExpansion f;
  std::int64_t t = 0;
  std::int64_t samples_seen = 0;
  std::mt19937_64 rng;
};

struct StepOutcome {
  double eta = 0.0;
  double epsilon = 0.0;
  /// |f_tilde - f_{t+1}|_H / eta.
  double bias = 0.0;
};

class Trainer {
 public:
  Trainer(TrainConfig config, Index dim);

  const TrainConfig& config() const noexcept { return config_; }
  const TrainerState& state() const noexcept { return state_; }
  /// sup sqrt(k(x, x)) over the samples seen so far (1 for gaussian).
  double kernel_bound() const noexcept { return kernel_bound_; }

  StepOutcome step(std::span<const Sample> batch, StepObserver* observer = nullptr);

 private:
  TrainConfig config_;
  TrainerState state_;
  double kernel_bound_;
};

struct TrainResult {
  KernelExpansion f;
  std::vector<MetricsRecord> metrics;
};

/// Runs config.passes passes over `data` in batches of config.batch_size
/// (the last batch may be short). Risk and error are measured on `eval`,
/// or on `data` when no eval set is given.
TrainResult train(const TrainConfig& config, const Dataset& data, const Dataset* eval = nullptr,
                  StepObserver* observer = nullptr);

}  // namespace polk

#endif  // POLK_TRAINER_HPP
