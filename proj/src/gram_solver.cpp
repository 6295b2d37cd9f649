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

#include "polk/gram_solver.hpp"

#include <cmath>

#include "polk/errors.hpp"

namespace polk {

GramSolver::GramSolver(const Matrix& gram) : size_(gram.rows()) {
  if (gram.cols() != gram.rows()) throw UsageError("GramSolver: matrix is not square");
  if (size_ == 0) return;
  const double scale = gram.diagonal().maxCoeff();
  if (scale > 0.0 && std::isfinite(scale)) {
    Matrix work = gram;
    for (double rel = kInitialJitter; rel <= kMaxJitter * (1.0 + 1e-9); rel *= 10.0) {
      jitter_ = rel * scale;
      work.diagonal() = gram.diagonal().array() + jitter_;
      llt_.compute(work);
      if (llt_.info() == Eigen::Success) return;
    }
  }
  // Fall back to the eigendecomposition pseudo-inverse.
  use_pinv_ = true;
  jitter_ = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& values = eig.eigenvalues();
  const double cutoff = kPinvCutoff * values.cwiseAbs().maxCoeff();
  Vector inv_values = Vector::Zero(size_);
  for (Index i = 0; i < size_; ++i) {
    if (values(i) > cutoff) inv_values(i) = 1.0 / values(i);
  }
  pinv_ = eig.eigenvectors() * inv_values.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix GramSolver::solve(const Matrix& rhs) const {
  if (size_ == 0) return Matrix(0, rhs.cols());
  if (use_pinv_) return pinv_ * rhs;
  return llt_.solve(rhs);
}

Matrix GramSolver::inverse() const {
  if (use_pinv_) return pinv_;
  return solve(Matrix::Identity(size_, size_));
}

}  // namespace polk
