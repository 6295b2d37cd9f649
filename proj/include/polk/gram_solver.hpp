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

#ifndef POLK_GRAM_SOLVER_HPP
#define POLK_GRAM_SOLVER_HPP

#include "polk/kernel.hpp"

namespace polk {

/// Factorization of a symmetric PSD gram matrix.
///
/// A Cholesky factorization is attempted with diagonal jitter starting at
/// 1e-10 * max(diag) and growing by 10x up to 1e-6 * max(diag). If none of
/// those succeed, an eigendecomposition pseudo-inverse with relative cutoff
/// 1e-10 is used instead.
class GramSolver {
 public:
  static constexpr double kInitialJitter = 1e-10;
  static constexpr double kMaxJitter = 1e-6;
  static constexpr double kPinvCutoff = 1e-10;

  explicit GramSolver(const Matrix& gram);

  Index size() const noexcept { return size_; }
  double jitter() const noexcept { return jitter_; }
  bool uses_pseudo_inverse() const noexcept { return use_pinv_; }

  Matrix solve(const Matrix& rhs) const;
  Matrix inverse() const;

 private:
  Index size_ = 0;
  double jitter_ = 0.0;
  bool use_pinv_ = false;
  Eigen::LLT<Matrix> llt_;
  Matrix pinv_;
};

}  // namespace polk

#endif  // POLK_GRAM_SOLVER_HPP
