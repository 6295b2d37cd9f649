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

#include "polk/komp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "polk/errors.hpp"
#include "polk/gram_solver.hpp"

namespace polk {

namespace {

using Positions = std::vector<Index>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Gram and projections of the function being pruned. Active sets are
/// sorted column indices into its dictionary. Bit-identical atoms form one
/// group; distances are evaluated on group sums so that folding an atom into
/// its twin is exactly cost-free.
class PruneTarget {
 public:
  explicit PruneTarget(const KernelExpansion& f) : f_(f) {
    const Matrix& pts = f.dict().points();
    auto less = [&pts](Index a, Index b) {
      const auto ca = pts.col(a);
      const auto cb = pts.col(b);
      return std::lexicographical_compare(ca.data(), ca.data() + ca.size(), cb.data(), cb.data() + cb.size());
    };
    std::map<Index, Index, decltype(less)> slot(less);
    Positions firsts;
    group_.resize(static_cast<std::size_t>(f.model_order()));
    for (Index n = 0; n < f.model_order(); ++n) {
      auto [it, inserted] = slot.try_emplace(n, static_cast<Index>(firsts.size()));
      if (inserted) firsts.push_back(n);
      group_[static_cast<std::size_t>(n)] = it->second;
    }
    has_twins_ = static_cast<Index>(firsts.size()) < f.model_order();
    k_groups_ = gram(f.kernel(), f.dict().select(firsts));
    k_ = has_twins_ ? Matrix(k_groups_(group_, group_)) : k_groups_;
    kw_ = k_ * f.weights();
    target_ = Matrix::Zero(k_groups_.rows(), f.num_classes());
    for (Index n = 0; n < f.model_order(); ++n) target_.row(group_[n]) += f.weights().row(n);
    norm_ = std::sqrt(std::max(0.0, (target_.transpose() * k_groups_ * target_).trace()));
  }

  double norm() const { return norm_; }
  bool has_twins() const { return has_twins_; }

  Matrix sub_gram(const Positions& active) const { return k_(active, active); }

  /// Exact pre-fit of the target on the atoms in `active`.
  Matrix fit(const Positions& active) const {
    if (active.empty()) return Matrix(0, f_.num_classes());
    return GramSolver(sub_gram(active)).solve(kw_(active, Eigen::all));
  }

  /// |W^T k_{D_active} - f|_H, evaluated as one expansion over the distinct
  /// input atoms (no cancellation against |f|^2).
  double distance(const Positions& active, const Matrix& w) const {
    Matrix diff = Matrix::Zero(target_.rows(), target_.cols());
    for (std::size_t i = 0; i < active.size(); ++i) diff.row(group_[active[i]]) += w.row(static_cast<Index>(i));
    diff -= target_;
    return std::sqrt(std::max(0.0, (diff.transpose() * k_groups_ * diff).trace()));
  }

  /// Another position in `active` holding the same atom as active[pos], or -1.
  Index twin(const Positions& active, std::size_t pos) const {
    if (!has_twins_) return -1;
    const Index g = group_[active[pos]];
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (i != pos && group_[active[i]] == g) return static_cast<Index>(i);
    }
    return -1;
  }

 private:
  const KernelExpansion& f_;
  Positions group_;
  bool has_twins_ = false;
  Matrix k_groups_;
  Matrix k_;
  Matrix kw_;
  Matrix target_;
  double norm_ = 0.0;
};

template <typename T>
std::vector<T> erase_at(const std::vector<T>& v, std::size_t pos) {
  std::vector<T> out;
  out.reserve(v.size() - 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != pos) out.push_back(v[i]);
  }
  return out;
}

Matrix drop_row(const Matrix& m, Index row) {
  Matrix out(m.rows() - 1, m.cols());
  out.topRows(row) = m.topRows(row);
  out.bottomRows(m.rows() - row - 1) = m.bottomRows(m.rows() - row - 1);
  return out;
}

Matrix drop_row_col(const Matrix& m, Index k) {
  Positions keep;
  keep.reserve(static_cast<std::size_t>(m.rows() - 1));
  for (Index i = 0; i < m.rows(); ++i) {
    if (i != k) keep.push_back(i);
  }
  return m(keep, keep);
}

/// Smallest position whose value is within `tol` of the minimum.
std::size_t near_argmin(const std::vector<double>& values, double tol) {
  const double best = *std::min_element(values.begin(), values.end());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] <= best + tol) return k;
  }
  return 0;
}

struct Removal {
  Matrix weights;
  double error = kInf;
};

/// Current weights without row `pos`; that row is folded into `twin` when
/// the atom has an identical copy.
Matrix fold_or_truncate(const Matrix& current, Index pos, Index twin) {
  Matrix out = current;
  if (twin >= 0) out.row(twin) += current.row(pos);
  return drop_row(out, pos);
}

/// Best of the supplied refit and the structural candidate (fold into a twin
/// or plain truncation of the current weights).
Removal best_removal(const PruneTarget& target, const Positions& active, std::size_t pos, Matrix refit,
                     const Matrix& current) {
  const Positions reduced = erase_at(active, pos);
  Removal out{std::move(refit), 0.0};
  out.error = target.distance(reduced, out.weights);
  Matrix structural = fold_or_truncate(current, static_cast<Index>(pos), target.twin(active, pos));
  const double structural_error = target.distance(reduced, structural);
  if (structural_error < out.error) {
    out.weights = std::move(structural);
    out.error = structural_error;
  }
  return out;
}

double tie_tolerance(const PruneTarget& target) { return 1e-10 * (1.0 + target.norm()); }

void record(PruneReport& report, Index column, double error) {
  report.removed_indices.push_back(column);
  report.final_error = error;
  ++report.passes;
}

void prune_reference(const PruneTarget& target, double epsilon, Positions& active, Matrix& w,
                     PruneReport& report) {
  while (!active.empty()) {
    std::vector<double> gamma(active.size());
    std::vector<Removal> candidates(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      candidates[k] = best_removal(target, active, k, target.fit(erase_at(active, k)), w);
      gamma[k] = candidates[k].error;
    }
    const std::size_t pick = near_argmin(gamma, tie_tolerance(target));
    if (gamma[pick] > epsilon) break;
    record(report, active[pick], gamma[pick]);
    active = erase_at(active, pick);
    w = std::move(candidates[pick].weights);
  }
}

/// Removes atoms that leave the function unchanged: copies of another active
/// atom and rows of exact zeros. Their removal error is the current residual,
/// which no other removal can beat.
void drop_neutral(const PruneTarget& target, double epsilon, Positions& active, Matrix& w, double& residual,
                  PruneReport& report) {
  while (!active.empty() && residual <= epsilon) {
    std::size_t pick = active.size();
    for (std::size_t k = 0; k < active.size() && pick == active.size(); ++k) {
      if (target.twin(active, k) >= 0 || w.row(static_cast<Index>(k)).isZero(0.0)) pick = k;
    }
    if (pick == active.size()) return;
    Removal r = best_removal(target, active, pick, Matrix::Zero(static_cast<Index>(active.size()) - 1, w.cols()), w);
    if (r.error > epsilon) return;
    record(report, active[pick], r.error);
    residual = r.error;
    active = erase_at(active, pick);
    w = std::move(r.weights);
  }
}

void prune_fast(const PruneTarget& target, double epsilon, Positions& active, Matrix& w,
                PruneReport& report) {
  double residual = report.final_error;
  drop_neutral(target, epsilon, active, w, residual, report);
  if (active.empty()) return;
  Matrix k_inv = GramSolver(target.sub_gram(active)).inverse();
  bool refreshed = false;
  while (!active.empty()) {
    std::vector<double> estimate(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Index i = static_cast<Index>(k);
      const double pivot = k_inv(i, i);
      const double sq = residual * residual + w.row(i).squaredNorm() / pivot;
      estimate[k] = (pivot > 0.0 && std::isfinite(sq)) ? std::sqrt(sq) : kInf;
    }
    const std::size_t pick = near_argmin(estimate, tie_tolerance(target));
    if (estimate[pick] > epsilon) break;

    const Index pos = static_cast<Index>(pick);
    const double pivot = k_inv(pos, pos);
    const Vector column = drop_row(k_inv.col(pos), pos);
    Matrix refit = drop_row(w, pos) - column * (w.row(pos) / pivot);
    Removal removal = best_removal(target, active, pick, std::move(refit), w);

    if (removal.error <= epsilon) {
      record(report, active[pick], removal.error);
      residual = removal.error;
      k_inv = drop_row_col(k_inv, pos) - column * column.transpose() / pivot;
      active = erase_at(active, pick);
      w = std::move(removal.weights);
      continue;
    }
    // The downdated state disagrees with the exact residual; rebuild it once
    // from scratch before concluding that nothing more can be removed.
    if (refreshed) break;
    refreshed = true;
    k_inv = GramSolver(target.sub_gram(active)).inverse();
    Matrix fitted = target.fit(active);
    const double fitted_error = target.distance(active, fitted);
    if (fitted_error <= target.distance(active, w)) {
      w = std::move(fitted);
      residual = fitted_error;
    }
  }
}

}  // namespace

Matrix refit_weights(const KernelSpec& kernel, const Dictionary& target_dict,
                     const Matrix& target_weights, const Dictionary& fit_dict) {
  if (target_weights.rows() != target_dict.size()) {
    throw UsageError("refit_weights: target weights do not match target dictionary");
  }
  if (fit_dict.dim() != target_dict.dim()) throw UsageError("refit_weights: dimension mismatch");
  if (fit_dict.empty()) return Matrix(0, target_weights.cols());
  const Matrix rhs = gram(kernel, fit_dict, target_dict) * target_weights;
  return GramSolver(gram(kernel, fit_dict)).solve(rhs);
}

Matrix refit_weights(const KernelExpansion& target, const Dictionary& fit_dict) {
  return refit_weights(target.kernel(), target.dict(), target.weights(), fit_dict);
}

double removal_error(const KernelExpansion& f, Index j) {
  if (j < 0 || j >= f.model_order()) {
    throw UsageError("removal_error: index " + std::to_string(j) + " out of range");
  }
  const PruneTarget target(f);
  Positions all(static_cast<std::size_t>(f.model_order()));
  std::iota(all.begin(), all.end(), Index{0});
  const std::size_t pos = static_cast<std::size_t>(j);
  return best_removal(target, all, pos, target.fit(erase_at(all, pos)), f.weights()).error;
}

PruneResult komp_prune(const KernelExpansion& f, const PruneBudget& budget, KompStrategy strategy) {
  if (!(budget.epsilon >= 0.0)) throw UsageError("komp_prune: epsilon must be >= 0");
  if (budget.max_model_order && f.model_order() > *budget.max_model_order) {
    throw CapacityError("komp_prune: model order " + std::to_string(f.model_order()) +
                        " exceeds cap " + std::to_string(*budget.max_model_order));
  }
  PruneReport report;
  if (f.model_order() == 0) return {f, report};

  const PruneTarget target(f);
  Positions active(static_cast<std::size_t>(f.model_order()));
  std::iota(active.begin(), active.end(), Index{0});
  Matrix w = f.weights();
  if (strategy == KompStrategy::reference) {
    prune_reference(target, budget.epsilon, active, w, report);
  } else {
    prune_fast(target, budget.epsilon, active, w, report);
  }
  return {KernelExpansion(f.kernel(), f.dict().select(active), std::move(w)), std::move(report)};
}

double subspace_distance(const KernelSpec& kernel, const Dictionary& dict, VectorRef x) {
  if (x.size() != dict.dim()) throw UsageError("subspace_distance: dimension mismatch");
  const double self = kernel(x, x);
  if (dict.empty()) return std::sqrt(std::max(0.0, self));
  const Vector coeffs = GramSolver(gram(kernel, dict)).solve(kernel_vector(kernel, dict, x));
  // |k(x,.) - coeffs^T k_D(.)|_H, with x merged into a coinciding atom.
  Dictionary point(dict.dim());
  point.append(x);
  const KernelExpansion projection(kernel, dict, coeffs);
  const KernelExpansion section(kernel, std::move(point), Matrix::Ones(1, 1));
  return expansion_distance(section, projection);
}

}  // namespace polk
