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

#ifndef POLK_KERNEL_HPP
#define POLK_KERNEL_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>

namespace polk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using VectorRef = Eigen::Ref<const Vector>;

enum class KernelFamily { gaussian, polynomial };

/// Reproducing kernel: gaussian exp(-|x-x'|^2 / (2 s)) with s the squared
/// bandwidth, or polynomial (x'x + b)^c.
class KernelSpec {
 public:
  static KernelSpec gaussian(double bandwidth_sq);
  static KernelSpec polynomial(double offset, int degree);

  KernelFamily family() const noexcept { return family_; }
  double bandwidth_sq() const noexcept { return bandwidth_sq_; }
  double offset() const noexcept { return offset_; }
  int degree() const noexcept { return degree_; }

  /// Unchecked evaluation; callers guarantee matching dimensions.
  double operator()(VectorRef a, VectorRef b) const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelSpec(KernelFamily family, double bandwidth_sq, double offset, int degree)
      : family_(family), bandwidth_sq_(bandwidth_sq), offset_(offset), degree_(degree) {}

  KernelFamily family_;
  double bandwidth_sq_;
  double offset_;
  int degree_;
};

/// Checked kernel evaluation. Throws UsageError on dimension mismatch.
double kernel_eval(const KernelSpec& kernel, VectorRef x, VectorRef x_prime);

/// Ordered set of atoms stored as the columns of a p x M matrix.
class Dictionary {
 public:
  explicit Dictionary(Index dim = 0) : points_(dim, 0) {}
  explicit Dictionary(Matrix points);

  Index dim() const noexcept { return points_.rows(); }
  Index size() const noexcept { return points_.cols(); }
  bool empty() const noexcept { return points_.cols() == 0; }
  const Matrix& points() const noexcept { return points_; }
  auto atom(Index n) const { return points_.col(n); }

  void append(VectorRef x);
  Dictionary select(std::span<const Index> columns) const;

 private:
  Matrix points_;
};

Vector kernel_vector(const KernelSpec& kernel, const Dictionary& dict, VectorRef x);

/// Cross-kernel matrix with entry (n, m) = k(a_n, b_m).
Matrix gram(const KernelSpec& kernel, const Dictionary& a, const Dictionary& b);

/// Symmetric gram of one dictionary; the upper triangle is mirrored so the
/// result is exactly symmetric.
Matrix gram(const KernelSpec& kernel, const Dictionary& dict);

struct GramBundle {
  Matrix k_dd;
  std::optional<Matrix> k_de;
  double jitter = 0.0;
};

/// K_DD (and K_DE when `other` is given) together with the diagonal jitter
/// the factorization of K_DD needed.
GramBundle make_gram_bundle(const KernelSpec& kernel, const Dictionary& dict,
                            const Dictionary* other = nullptr);

/// Vector-valued RKHS function f = W^T k_D(.), one weight column per class.
/// All classes share the dictionary.
class KernelExpansion {
 public:
  KernelExpansion(KernelSpec kernel, Dictionary dict, Matrix weights);

  /// The zero function: empty dictionary of dimension `dim`, C classes.
  static KernelExpansion zero(const KernelSpec& kernel, Index dim, Index num_classes);

  const KernelSpec& kernel() const noexcept { return kernel_; }
  const Dictionary& dict() const noexcept { return dict_; }
  const Matrix& weights() const noexcept { return weights_; }
  Index dim() const noexcept { return dict_.dim(); }
  Index model_order() const noexcept { return dict_.size(); }
  Index num_classes() const noexcept { return weights_.cols(); }

 private:
  KernelSpec kernel_;
  Dictionary dict_;
  Matrix weights_;
};

/// f(x) = W^T k_D(x); the zero vector of length C when M = 0.
Vector evaluate(const KernelExpansion& f, VectorRef x);

/// sum_c w_{f,c}^T K_{Df,Dg} w_{g,c}.
double hilbert_inner(const KernelExpansion& f, const KernelExpansion& g);

/// Joint norm sqrt(trace(W^T K_DD W)).
double hilbert_norm(const KernelExpansion& f);

/// |f - g|_H. Atoms shared bit-for-bit by both expansions are merged before
/// the quadratic form is evaluated, so distances between functions that
/// share most of their dictionary do not lose precision to cancellation.
double expansion_distance(const KernelExpansion& f, const KernelExpansion& g);

}  // namespace polk

#endif  // POLK_KERNEL_HPP
