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

#include "polk/losses.hpp"

#include <cmath>
#include <string>

#include "polk/dataset.hpp"
#include "polk/errors.hpp"

namespace polk {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_label(const LossKind& kind, int label) {
  if (!kind.valid_label(label)) {
    throw UsageError("label " + std::to_string(label) + " outside the alphabet of " +
                     std::string(to_string(kind.family())) + " with " + std::to_string(kind.num_classes()) +
                     " classes");
  }
}

}  // namespace

LossKind LossKind::multi_hinge(int num_classes) {
  if (num_classes < 2) throw UsageError("multi_hinge needs at least 2 classes");
  return LossKind(LossFamily::multi_hinge, num_classes);
}

LossKind LossKind::multi_logistic(int num_classes) {
  if (num_classes < 2) throw UsageError("multi_logistic needs at least 2 classes");
  return LossKind(LossFamily::multi_logistic, num_classes);
}

LossKind LossKind::binary_logistic() { return LossKind(LossFamily::binary_logistic, 1); }

bool LossKind::valid_label(int label) const noexcept {
  if (is_binary()) return label == 0 || label == 1;
  return label >= 1 && label <= num_classes_;
}

std::string_view to_string(LossFamily family) {
  switch (family) {
    case LossFamily::multi_hinge: return "multi_hinge";
    case LossFamily::multi_logistic: return "multi_logistic";
    case LossFamily::binary_logistic: return "binary_logistic";
  }
  return "unknown";
}

LossFamily parse_loss_family(std::string_view name) {
  if (name == "multi_hinge") return LossFamily::multi_hinge;
  if (name == "multi_logistic") return LossFamily::multi_logistic;
  if (name == "binary_logistic") return LossFamily::binary_logistic;
  throw UsageError("unknown loss '" + std::string(name) + "'");
}

LossGrad loss_and_grad(const LossKind& kind, VectorRef scores, int label) {
  require_label(kind, label);
  if (scores.size() != kind.num_classes()) throw UsageError("loss_and_grad: score vector has wrong length");
  LossGrad out;
  out.grad = Vector::Zero(scores.size());
  switch (kind.family()) {
    case LossFamily::multi_hinge: {
      const Index y = label - 1;
      Index rival = y == 0 ? 1 : 0;
      for (Index c = 0; c < scores.size(); ++c) {
        if (c != y && scores(c) > scores(rival)) rival = c;
      }
      const double margin = 1.0 + scores(rival) - scores(y);
      if (margin > 0.0) {
        out.value = margin;
        out.grad(rival) = 1.0;
        out.grad(y) = -1.0;
      }
      break;
    }
    case LossFamily::multi_logistic: {
      const double top = scores.maxCoeff();
      const Vector shifted = (scores.array() - top).exp().matrix();
      const double total = shifted.sum();
      out.value = top + std::log(total) - scores(label - 1);
      out.grad = shifted / total;
      out.grad(label - 1) -= 1.0;
      break;
    }
    case LossFamily::binary_logistic: {
      // P(y = 0 | x) = sigma(f).
      const double f = scores(0);
      const double is_zero = label == 0 ? 1.0 : 0.0;
      out.value = softplus(f) - f * is_zero;
      out.grad(0) = logistic(f) - is_zero;
      break;
    }
  }
  return out;
}

double lipschitz_constant(const LossKind& kind) { return kind.is_binary() ? 1.0 : std::sqrt(2.0); }

double regularized_risk(const KernelExpansion& f, const Dataset& data, const LossKind& kind,
                        double lambda) {
  if (data.size() == 0) throw UsageError("regularized_risk: empty dataset");
  if (!(lambda >= 0.0)) throw UsageError("regularized_risk: lambda must be >= 0");
  double total = 0.0;
  for (Index n = 0; n < data.size(); ++n) {
    const Vector scores = evaluate(f, data.features.row(n).transpose());
    total += loss_and_grad(kind, scores, data.labels[static_cast<std::size_t>(n)]).value;
  }
  const double norm = hilbert_norm(f);
  return total / static_cast<double>(data.size()) + 0.5 * lambda * norm * norm;
}

int predict(const LossKind& kind, VectorRef scores) {
  if (kind.is_binary()) return scores(0) > 0.0 ? 0 : 1;
  Index best = 0;
  for (Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = c;
  }
  return static_cast<int>(best) + 1;
}

int predict(const KernelExpansion& f, const LossKind& kind, VectorRef x) {
  return predict(kind, evaluate(f, x));
}

double error_rate_pct(const KernelExpansion& f, const Dataset& data, const LossKind& kind) {
  if (data.size() == 0) throw UsageError("error_rate_pct: empty dataset");
  Index wrong = 0;
  for (Index n = 0; n < data.size(); ++n) {
    if (predict(f, kind, data.features.row(n).transpose()) != data.labels[static_cast<std::size_t>(n)]) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace polk
