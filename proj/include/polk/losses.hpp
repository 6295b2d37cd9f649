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

#ifndef POLK_LOSSES_HPP
#define POLK_LOSSES_HPP

#include <string>
#include <string_view>

#include "polk/kernel.hpp"

namespace polk {

struct Dataset;

enum class LossFamily { multi_hinge, multi_logistic, binary_logistic };

/// Loss family plus number of activations. binary_logistic has a single
/// activation and labels {0, 1}; the multi-class losses take labels 1..C.
class LossKind {
 public:
  static LossKind multi_hinge(int num_classes);
  static LossKind multi_logistic(int num_classes);
  static LossKind binary_logistic();

  LossFamily family() const noexcept { return family_; }
  int num_classes() const noexcept { return num_classes_; }
  bool is_binary() const noexcept { return family_ == LossFamily::binary_logistic; }
  bool valid_label(int label) const noexcept;

  friend bool operator==(const LossKind&, const LossKind&) = default;

 private:
  LossKind(LossFamily family, int num_classes) : family_(family), num_classes_(num_classes) {}

  LossFamily family_;
  int num_classes_;
};

std::string_view to_string(LossFamily family);
LossFamily parse_loss_family(std::string_view name);

struct LossGrad {
  double value = 0.0;
  /// d loss / d f_c(x), data term only.
  Vector grad;
};

LossGrad loss_and_grad(const LossKind& kind, VectorRef scores, int label);

/// Bound on the euclidean norm of the loss gradient vector: 1 for the
/// binary loss, sqrt(2) for the multi-class losses.
double lipschitz_constant(const LossKind& kind);

/// (1/N) sum_n loss(f(x_n), y_n) + (lambda/2) |f|_H^2.
double regularized_risk(const KernelExpansion& f, const Dataset& data, const LossKind& kind,
                        double lambda);

/// Argmax class (ties to the smallest) or, for binary_logistic, label 0
/// when f(x) > 0 and 1 otherwise.
int predict(const LossKind& kind, VectorRef scores);
int predict(const KernelExpansion& f, const LossKind& kind, VectorRef x);

/// Percentage of misclassified samples.
double error_rate_pct(const KernelExpansion& f, const Dataset& data, const LossKind& kind);

}  // namespace polk

#endif  // POLK_LOSSES_HPP
