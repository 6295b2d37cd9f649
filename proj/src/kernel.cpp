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

#include "polk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "polk/errors.hpp"
#include "polk/gram_solver.hpp"

namespace polk {

KernelSpec KernelSpec::gaussian(double bandwidth_sq) {
  if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq)) {
    throw UsageError("gaussian kernel needs a positive finite squared bandwidth");
  }
  return KernelSpec(KernelFamily::gaussian, bandwidth_sq, 0.0, 0);
}

KernelSpec KernelSpec::polynomial(double offset, int degree) {
  if (degree < 1) throw UsageError("polynomial kernel degree must be >= 1");
  if (!std::isfinite(offset)) throw UsageError("polynomial kernel offset must be finite");
  return KernelSpec(KernelFamily::polynomial, 0.0, offset, degree);
}

double KernelSpec::operator()(VectorRef a, VectorRef b) const {
  if (family_ == KernelFamily::gaussian) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth_sq_));
  }
  return std::pow(a.dot(b) + offset_, degree_);
}

double kernel_eval(const KernelSpec& kernel, VectorRef x, VectorRef x_prime) {
  if (x.size() != x_prime.size()) {
    throw UsageError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(x_prime.size()) + ")");
  }
  return kernel(x, x_prime);
}

Dictionary::Dictionary(Matrix points) : points_(std::move(points)) {
  if (!points_.allFinite()) throw UsageError("dictionary atoms must be finite");
}

void Dictionary::append(VectorRef x) {
  if (x.size() != dim()) throw UsageError("dictionary append: dimension mismatch");
  if (!x.allFinite()) throw UsageError("dictionary atoms must be finite");
  points_.conservativeResize(Eigen::NoChange, points_.cols() + 1);
  points_.col(points_.cols() - 1) = x;
}

Dictionary Dictionary::select(std::span<const Index> columns) const {
  Matrix out(dim(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) out.col(static_cast<Index>(k)) = points_.col(columns[k]);
  return Dictionary(std::move(out));
}

Vector kernel_vector(const KernelSpec& kernel, const Dictionary& dict, VectorRef x) {
  if (x.size() != dict.dim()) throw UsageError("kernel_vector: dimension mismatch");
  Vector out(dict.size());
  for (Index n = 0; n < dict.size(); ++n) out(n) = kernel(dict.atom(n), x);
  return out;
}

Matrix gram(const KernelSpec& kernel, const Dictionary& a, const Dictionary& b) {
  if (a.dim() != b.dim()) throw UsageError("gram: dimension mismatch");
  Matrix out(a.size(), b.size());
  for (Index m = 0; m < b.size(); ++m) {
    for (Index n = 0; n < a.size(); ++n) out(n, m) = kernel(a.atom(n), b.atom(m));
  }
  return out;
}

Matrix gram(const KernelSpec& kernel, const Dictionary& dict) {
  const Index size = dict.size();
  Matrix out(size, size);
  for (Index m = 0; m < size; ++m) {
    for (Index n = 0; n <= m; ++n) {
      out(n, m) = kernel(dict.atom(n), dict.atom(m));
      out(m, n) = out(n, m);
    }
  }
  return out;
}

GramBundle make_gram_bundle(const KernelSpec& kernel, const Dictionary& dict,
                            const Dictionary* other) {
  GramBundle bundle;
  bundle.k_dd = gram(kernel, dict);
  if (other != nullptr) bundle.k_de = gram(kernel, dict, *other);
  bundle.jitter = GramSolver(bundle.k_dd).jitter();
  return bundle;
}

KernelExpansion::KernelExpansion(KernelSpec kernel, Dictionary dict, Matrix weights)
    : kernel_(kernel), dict_(std::move(dict)), weights_(std::move(weights)) {
  if (weights_.rows() != dict_.size()) {
    throw UsageError("kernel expansion: weight rows (" + std::to_string(weights_.rows()) +
                     ") must equal model order (" + std::to_string(dict_.size()) + ")");
  }
  if (weights_.cols() < 1) throw UsageError("kernel expansion: need at least one class");
  if (!weights_.allFinite()) throw UsageError("kernel expansion: weights must be finite");
}

KernelExpansion KernelExpansion::zero(const KernelSpec& kernel, Index dim, Index num_classes) {
  return KernelExpansion(kernel, Dictionary(dim), Matrix(0, num_classes));
}

Vector evaluate(const KernelExpansion& f, VectorRef x) {
  if (x.size() != f.dim()) throw UsageError("evaluate: dimension mismatch");
  Vector out = Vector::Zero(f.num_classes());
  for (Index n = 0; n < f.model_order(); ++n) {
    out += f.kernel()(f.dict().atom(n), x) * f.weights().row(n).transpose();
  }
  return out;
}

namespace {

void require_compatible(const KernelExpansion& f, const KernelExpansion& g, const char* op) {
  if (!(f.kernel() == g.kernel())) throw UsageError(std::string(op) + ": kernel mismatch");
  if (f.num_classes() != g.num_classes()) throw UsageError(std::string(op) + ": class count mismatch");
  if (f.dim() != g.dim()) throw UsageError(std::string(op) + ": dimension mismatch");
}

struct ColumnLess {
  const Matrix* points;
  bool operator()(Index a, Index b) const {
    const auto ca = points->col(a);
    const auto cb = points->col(b);
    return std::lexicographical_compare(ca.data(), ca.data() + ca.size(), cb.data(),
                                        cb.data() + cb.size());
  }
};

}  // namespace

double hilbert_inner(const KernelExpansion& f, const KernelExpansion& g) {
  require_compatible(f, g, "hilbert_inner");
  if (f.model_order() == 0 || g.model_order() == 0) return 0.0;
  const Matrix cross = gram(f.kernel(), f.dict(), g.dict());
  return (f.weights().transpose() * cross * g.weights()).trace();
}

double hilbert_norm(const KernelExpansion& f) {
  if (f.model_order() == 0) return 0.0;
  const Matrix k = gram(f.kernel(), f.dict());
  const double sq = (f.weights().transpose() * k * f.weights()).trace();
  return std::sqrt(std::max(0.0, sq));
}

double expansion_distance(const KernelExpansion& f, const KernelExpansion& g) {
  require_compatible(f, g, "expansion_distance");
  // Union dictionary with bit-identical atoms merged; the difference f - g
  // is then a single expansion over the union.
  Matrix all(f.dim(), f.model_order() + g.model_order());
  all << f.dict().points(), g.dict().points();
  std::map<Index, Index, ColumnLess> slot_of{ColumnLess{&all}};
  std::vector<Index> owner(static_cast<std::size_t>(all.cols()));
  std::vector<Index> unique_cols;
  for (Index n = 0; n < all.cols(); ++n) {
    auto [it, inserted] = slot_of.try_emplace(n, static_cast<Index>(unique_cols.size()));
    if (inserted) unique_cols.push_back(n);
    owner[static_cast<std::size_t>(n)] = it->second;
  }
  Matrix diff = Matrix::Zero(static_cast<Index>(unique_cols.size()), f.num_classes());
  for (Index n = 0; n < f.model_order(); ++n) diff.row(owner[n]) += f.weights().row(n);
  for (Index n = 0; n < g.model_order(); ++n) {
    diff.row(owner[f.model_order() + n]) -= g.weights().row(n);
  }
  if (diff.rows() == 0) return 0.0;
  const Dictionary merged(Dictionary(std::move(all)).select(unique_cols));
  const Matrix k = gram(f.kernel(), merged);
  const double sq = (diff.transpose() * k * diff).trace();
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace polk
