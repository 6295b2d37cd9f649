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

#ifndef POLK_DIAGNOSTICS_HPP
#define POLK_DIAGNOSTICS_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "polk/kernel.hpp"
#include "polk/trainer.hpp"

namespace polk {

struct ProbeRecord {
  std::int64_t t = 0;
  double eta = 0.0;
  double epsilon = 0.0;
  /// |f_tilde - f_{t+1}|_H / eta, recomputed from the expansions.
  double bias = 0.0;
  /// |f_{t+1}|_H.
  double iterate_norm = 0.0;
  /// |(f_t - f_tilde) / eta|_H^2, the squared stochastic gradient norm.
  double grad_norm_sq = 0.0;
  /// Kernel bound X in force at this step.
  double kernel_bound = 1.0;
  Index model_order = 0;
  /// |f_{t+1} - f_ref|_H when the probe holds a reference function.
  double dist_to_ref = std::numeric_limits<double>::quiet_NaN();
};

enum class CheckStatus { pass, fail, not_applicable };

struct CheckResult {
  CheckStatus status = CheckStatus::not_applicable;
  /// bound - value; negative on failure.
  double slack = 0.0;
};

/// Watches a training run and keeps one ProbeRecord per step.
class TheoryProbe : public StepObserver {
 public:
  TheoryProbe(double lipschitz, double lambda, const KernelSpec& kernel,
              std::optional<KernelExpansion> reference = std::nullopt);

  void on_step(const StepView& step) override;

  double lipschitz() const noexcept { return lipschitz_; }
  double lambda() const noexcept { return lambda_; }
  double kernel_bound() const noexcept { return kernel_bound_; }
  const std::vector<ProbeRecord>& records() const noexcept { return records_; }

  /// Test hook: the epsilon written into each record is multiplied by this.
  void set_epsilon_scale(double scale) noexcept { epsilon_scale_ = scale; }

 private:
  double lipschitz_;
  double lambda_;
  KernelSpec kernel_;
  double kernel_bound_;
  std::optional<KernelExpansion> reference_;
  double epsilon_scale_ = 1.0;
  std::vector<ProbeRecord> records_;
};

/// Pass iff bias <= eps/eta + 1e-8 (1 + eps/eta).
CheckResult bias_check(const ProbeRecord& record);

/// Pass iff |f_t| <= C X / lambda (1 + 1e-8); not applicable for lambda = 0.
CheckResult norm_bound_check(const ProbeRecord& record, const TheoryProbe& probe);

/// Mean of grad_norm_sq. Needs at least two records.
double variance_estimate(const std::vector<ProbeRecord>& records);

/// (sqrt(eta) / lambda) (K + sqrt(K^2 + lambda sigma^2)).
double neighborhood_radius(double eta, double lambda, double k, double sigma_sq);

struct NeighborhoodReport {
  double eta = 0.0;
  double sigma_sq = 0.0;
  double radius = 0.0;
  /// min of dist_to_ref over the last 5% of steps; NaN without a reference.
  double trailing_min_dist = std::numeric_limits<double>::quiet_NaN();
};

/// Requires a constant step size across the records and lambda > 0.
NeighborhoodReport neighborhood_report(const std::vector<ProbeRecord>& records, const TheoryProbe& probe,
                                       double k);

struct ProbeSummary {
  std::int64_t steps = 0;
  std::int64_t bias_failures = 0;
  std::int64_t norm_failures = 0;
  bool norm_applicable = false;
};

ProbeSummary summarize(const TheoryProbe& probe);

/// Per-step CSV: t,eta,epsilon,bias,bias_bound,bias_check,iterate_norm,
/// norm_bound,norm_check,grad_norm_sq,model_order,dist_to_ref.
void write_probe_csv(std::ostream& out, const TheoryProbe& probe);

}  // namespace polk

#endif  // POLK_DIAGNOSTICS_HPP
