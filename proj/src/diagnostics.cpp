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

#include "polk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "polk/dataset.hpp"
#include "polk/errors.hpp"

namespace polk {

namespace {

constexpr double kRelTol = 1e-8;

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "n/a";
  }
  return "?";
}

}  // namespace

TheoryProbe::TheoryProbe(double lipschitz, double lambda, const KernelSpec& kernel,
                         std::optional<KernelExpansion> reference)
    : lipschitz_(lipschitz),
      lambda_(lambda),
      kernel_(kernel),
      kernel_bound_(kernel.family() == KernelFamily::gaussian ? 1.0 : 0.0),
      reference_(std::move(reference)) {
  if (!(lipschitz > 0.0) || !(lambda >= 0.0)) throw UsageError("TheoryProbe: need C > 0 and lambda >= 0");
}

void TheoryProbe::on_step(const StepView& step) {
  if (!records_.empty() && step.t <= records_.back().t) throw UsageError("TheoryProbe: steps out of order");
  if (kernel_.family() != KernelFamily::gaussian) {
    for (const Sample& s : step.batch) kernel_bound_ = std::max(kernel_bound_, std::sqrt(std::max(0.0, kernel_(s.x, s.x))));
  }
  ProbeRecord r;
  r.t = step.t;
  r.eta = step.eta;
  r.epsilon = step.epsilon * epsilon_scale_;
  r.bias = expansion_distance(step.candidate, step.after) / step.eta;
  r.iterate_norm = hilbert_norm(step.after);
  const double g = expansion_distance(step.before, step.candidate) / step.eta;
  r.grad_norm_sq = g * g;
  r.kernel_bound = kernel_bound_;
  r.model_order = step.after.model_order();
  if (reference_) r.dist_to_ref = expansion_distance(step.after, *reference_);
  records_.push_back(r);
}

CheckResult bias_check(const ProbeRecord& record) {
  if (!(record.eta > 0.0)) throw UsageError("bias_check: eta must be positive");
  const double ratio = record.epsilon / record.eta;
  const double bound = ratio + kRelTol * (1.0 + ratio);
  return {record.bias <= bound ? CheckStatus::pass : CheckStatus::fail, bound - record.bias};
}

CheckResult norm_bound_check(const ProbeRecord& record, const TheoryProbe& probe) {
  if (probe.lambda() == 0.0) return {CheckStatus::not_applicable, 0.0};
  const double cx = probe.lipschitz() * record.kernel_bound / probe.lambda();
  const double bound = cx + kRelTol * cx;
  return {record.iterate_norm <= bound ? CheckStatus::pass : CheckStatus::fail, bound - record.iterate_norm};
}

double variance_estimate(const std::vector<ProbeRecord>& records) {
  if (records.size() < 2) throw UsageError("variance_estimate: need at least two records");
  double sum = 0.0;
  for (const ProbeRecord& r : records) sum += r.grad_norm_sq;
  return sum / static_cast<double>(records.size());
}

double neighborhood_radius(double eta, double lambda, double k, double sigma_sq) {
  if (!(eta > 0.0) || !(lambda > 0.0) || !(k >= 0.0) || !(sigma_sq >= 0.0)) {
    throw UsageError("neighborhood_radius: need eta, lambda > 0 and K, sigma^2 >= 0");
  }
  return std::sqrt(eta) / lambda * (k + std::sqrt(k * k + lambda * sigma_sq));
}

NeighborhoodReport neighborhood_report(const std::vector<ProbeRecord>& records, const TheoryProbe& probe,
                                       double k) {
  if (records.size() < 2) throw UsageError("neighborhood_report: need at least two records");
  const double eta = records.front().eta;
  for (const ProbeRecord& r : records) {
    if (r.eta != eta) throw UsageError("neighborhood_report: step size is not constant");
  }
  NeighborhoodReport out;
  out.eta = eta;
  out.sigma_sq = variance_estimate(records);
  out.radius = neighborhood_radius(eta, probe.lambda(), k, out.sigma_sq);
  const std::size_t window = std::max<std::size_t>(1, records.size() / 20);
  for (std::size_t i = records.size() - window; i < records.size(); ++i) {
    const double d = records[i].dist_to_ref;
    if (std::isnan(d)) continue;
    out.trailing_min_dist = std::isnan(out.trailing_min_dist) ? d : std::min(out.trailing_min_dist, d);
  }
  return out;
}

ProbeSummary summarize(const TheoryProbe& probe) {
  ProbeSummary s;
  s.norm_applicable = probe.lambda() > 0.0;
  for (const ProbeRecord& r : probe.records()) {
    ++s.steps;
    if (bias_check(r).status == CheckStatus::fail) ++s.bias_failures;
    if (norm_bound_check(r, probe).status == CheckStatus::fail) ++s.norm_failures;
  }
  return s;
}

void write_probe_csv(std::ostream& out, const TheoryProbe& probe) {
  out << "t,eta,epsilon,bias,bias_bound,bias_check,iterate_norm,norm_bound,norm_check,grad_norm_sq,model_order,"
         "dist_to_ref\n";
  for (const ProbeRecord& r : probe.records()) {
    const CheckResult b = bias_check(r);
    const CheckResult n = norm_bound_check(r, probe);
    const double nb = probe.lambda() > 0.0 ? probe.lipschitz() * r.kernel_bound / probe.lambda()
                                           : std::numeric_limits<double>::quiet_NaN();
    out << r.t << ',' << format_double(r.eta) << ',' << format_double(r.epsilon) << ',' << format_double(r.bias)
        << ',' << format_double(r.epsilon / r.eta) << ',' << status_name(b.status) << ','
        << format_double(r.iterate_norm) << ',' << format_double(nb) << ',' << status_name(n.status) << ','
        << format_double(r.grad_norm_sq) << ',' << r.model_order << ',' << format_double(r.dist_to_ref) << '\n';
  }
}

}  // namespace polk
