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

#ifndef POLK_KOMP_HPP
#define POLK_KOMP_HPP

#include <optional>
#include <vector>

#include "polk/kernel.hpp"

namespace polk {

struct PruneBudget {
  double epsilon = 0.0;
  /// Inputs with more atoms than this are rejected with CapacityError.
  std::optional<Index> max_model_order;
};

struct PruneReport {
  /// Column indices of the input dictionary, in removal order.
  std::vector<Index> removed_indices;
  /// |f - f_input|_H of the returned function.
  double final_error = 0.0;
  Index passes = 0;
};

struct PruneResult {
  KernelExpansion f;
  PruneReport report;
};

/// How the per-pass removal errors are obtained.
///  - reference: every gamma_j is an explicit least-squares refit on the
///    dictionary without atom j followed by a residual norm, O(M^4) per pass.
///  - fast: gamma_j^2 = r^2 + sum_c W_jc^2 / [K^-1]_jj from the current
///    pre-fit, with a rank-one downdate of K^-1 after each removal,
///    O(M^2) per pass. Every accepted removal is still verified with an
///    exact residual norm, so the budget guarantee is the same.
enum class KompStrategy { reference, fast };

/// argmin_W |W^T k_D - target|_H, i.e. the solution of
/// K_DD W = K_{D,Dt} Wt (jittered solve). Empty `fit_dict` gives 0 x C.
Matrix refit_weights(const KernelSpec& kernel, const Dictionary& target_dict,
                     const Matrix& target_weights, const Dictionary& fit_dict);
Matrix refit_weights(const KernelExpansion& target, const Dictionary& fit_dict);

/// gamma_j: the smallest |f - g|_H over g supported on the dictionary of f
/// with column j removed. Removing the only atom gives |f|_H.
double removal_error(const KernelExpansion& f, Index j);

/// Destructive kernel OMP with pre-fitting. Greedily removes the atom with
/// the least removal error (ties to the smallest index) while that error is
/// within budget.epsilon; weights are always re-fit against the input f.
PruneResult komp_prune(const KernelExpansion& f, const PruneBudget& budget,
                       KompStrategy strategy = KompStrategy::fast);

/// Distance from k(x, .) to span{k(d_n, .)}.
double subspace_distance(const KernelSpec& kernel, const Dictionary& dict, VectorRef x);

}  // namespace polk

#endif  // POLK_KOMP_HPP
