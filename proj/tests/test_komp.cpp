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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polk/errors.hpp"
#include "polk/komp.hpp"
#include "polk/losses.hpp"
#include "polk/trainer.hpp"

using namespace polk;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

KernelExpansion expansion(const KernelSpec& k, std::initializer_list<Vector> pts, std::initializer_list<double> w) {
  Dictionary d(pts.begin()->size());
  for (const Vector& p : pts) d.append(p);
  Matrix wm(static_cast<Index>(w.size()), 1);
  Index i = 0;
  for (double x : w) wm(i++, 0) = x;
  return KernelExpansion(k, d, wm);
}

using oracle::Instance;

Instance random_instance(std::mt19937_64& rng, Index max_m = 12) { return oracle::conditioned_instance(rng, max_m); }

}  // namespace

TEST_CASE("refit_weights") {
  const auto k = KernelSpec::gaussian(0.7);
  const auto f = expansion(k, {v2(0, 0), v2(1, 0), v2(0, 1.5)}, {1.0, -2.0, 0.5});
  const Matrix same = refit_weights(f, f.dict());
  CHECK((same - f.weights()).cwiseAbs().maxCoeff() <= 1e-8);

  const auto dup = expansion(k, {v2(0.2, 0.2), v2(0.2, 0.2)}, {1.5, -0.25});
  Dictionary one(2);
  one.append(v2(0.2, 0.2));
  const Matrix merged = refit_weights(dup, one);
  CHECK(merged(0, 0) == doctest::Approx(1.25).epsilon(1e-9));  // singular gram, jittered

  CHECK(refit_weights(f, Dictionary(2)).rows() == 0);
  CHECK_THROWS_AS(refit_weights(f, Dictionary(3)), UsageError);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = random_instance(rng, 5);
    const KernelExpansion& g = inst.f;
    if (g.model_order() < 2) continue;
    const Index drop = trial % g.model_order();
    std::vector<Index> keep;
    for (Index n = 0; n < g.model_order(); ++n)
      if (n != drop) keep.push_back(n);
    const Matrix w = refit_weights(g, g.dict().select(keep));
    const oracle::LsFit ls = oracle::least_squares_fit(g, keep);
    // compare the fitted functions, which are unique even when weights are not
    const KernelExpansion fit(g.kernel(), g.dict().select(keep), w);
    const KernelExpansion fit_ls(g.kernel(), g.dict().select(keep), ls.weights);
    CHECK(oracle::distance(fit, fit_ls) <= 1e-7 * (1.0 + hilbert_norm(g)));
    CHECK(std::abs(oracle::distance(fit, g) - ls.residual) <= 1e-8 * (1.0 + hilbert_norm(g)));
  }
}

TEST_CASE("removal_error") {
  const auto k = KernelSpec::gaussian(0.5);
  const auto dup = expansion(k, {v2(0.3, 0.1), v2(0.3, 0.1)}, {2.0, 0.5});
  CHECK(removal_error(dup, 0) == doctest::Approx(0.0));
  CHECK(removal_error(dup, 1) == doctest::Approx(0.0));
  CHECK(removal_error(expansion(k, {v2(1, 1)}, {3.0}), 0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(removal_error(dup, 2), UsageError);
  CHECK_THROWS_AS(removal_error(dup, -1), UsageError);

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = random_instance(rng, 5);
    for (Index j = 0; j < inst.f.model_order(); ++j) {
      const double want = oracle::removal_error(inst.f, j);
      CHECK(std::abs(removal_error(inst.f, j) - want) <= 1e-8 * std::max(want, hilbert_norm(inst.f)));
    }
  }
}

TEST_CASE("komp_prune examples") {
  const auto k = KernelSpec::gaussian(0.5);
  SUBCASE("zero budget keeps well separated atoms") {
    const auto f = expansion(k, {v2(0, 0), v2(3, 0), v2(0, 3)}, {1.0, 2.0, -1.0});
    for (auto strategy : {KompStrategy::reference, KompStrategy::fast}) {
      const PruneResult r = komp_prune(f, {0.0, std::nullopt}, strategy);
      CHECK(r.f.model_order() == 3);
      CHECK(r.f.weights() == f.weights());
      CHECK(r.report.passes == 0);
      CHECK(r.report.final_error == 0.0);
    }
  }
  SUBCASE("duplicate pair merges") {
    const auto f = expansion(k, {v2(0.5, 0.5), v2(0.5, 0.5)}, {1.0, 2.5});
    for (auto strategy : {KompStrategy::reference, KompStrategy::fast}) {
      const PruneResult r = komp_prune(f, {0.0, std::nullopt}, strategy);
      REQUIRE(r.f.model_order() == 1);
      CHECK(r.f.weights()(0, 0) == doctest::Approx(3.5).epsilon(1e-9));
      CHECK(r.report.final_error == doctest::Approx(0.0));
      CHECK(r.report.removed_indices == std::vector<Index>{0});
    }
  }
  SUBCASE("large budget gives the zero function") {
    const auto f = expansion(k, {v2(1, 2)}, {3.0});
    for (auto strategy : {KompStrategy::reference, KompStrategy::fast}) {
      const PruneResult r = komp_prune(f, {5.0, std::nullopt}, strategy);
      CHECK(r.f.model_order() == 0);
      CHECK(r.report.final_error == doctest::Approx(3.0).epsilon(1e-14));
    }
  }
  SUBCASE("errors") {
    const auto f = expansion(k, {v2(1, 2), v2(0, 0)}, {3.0, 1.0});
    CHECK_THROWS_AS(komp_prune(f, {-1.0, std::nullopt}), UsageError);
    CHECK_THROWS_AS(komp_prune(f, {std::nan(""), std::nullopt}), UsageError);
    CHECK_THROWS_AS(komp_prune(f, {0.1, Index{1}}), CapacityError);
    CHECK_NOTHROW(komp_prune(f, {0.1, Index{2}}));
  }
  SUBCASE("zero function input") {
    const PruneResult r = komp_prune(KernelExpansion::zero(k, 2, 2), {1.0, std::nullopt});
    CHECK(r.f.model_order() == 0);
    CHECK(r.report.passes == 0);
  }
}

TEST_CASE("komp_prune properties") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const Instance inst = random_instance(rng);
    const double nf = hilbert_norm(inst.f);
    const PruneResult fast = komp_prune(inst.f, {inst.epsilon, std::nullopt}, KompStrategy::fast);
    const PruneResult ref = komp_prune(inst.f, {inst.epsilon, std::nullopt}, KompStrategy::reference);
    for (const PruneResult* r : {&fast, &ref}) {
      const double err = oracle::distance(r->f, inst.f);
      CHECK(err <= inst.epsilon + 1e-8 * (1.0 + nf));
      CHECK(std::abs(err - r->report.final_error) <= 1e-8 * (1.0 + nf));
      CHECK(r->f.model_order() + static_cast<Index>(r->report.removed_indices.size()) == inst.f.model_order());
      CHECK(r->report.passes == static_cast<Index>(r->report.removed_indices.size()));
    }
    // the two strategies agree on which atoms go and on the result
    CHECK(fast.report.removed_indices == ref.report.removed_indices);
    if (fast.report.removed_indices == ref.report.removed_indices) {
      CHECK(oracle::distance(fast.f, ref.f) <= 1e-8 * (1.0 + nf));
    }
    // determinism
    const PruneResult again = komp_prune(inst.f, {inst.epsilon, std::nullopt});
    CHECK(again.report.removed_indices == fast.report.removed_indices);
    CHECK(again.f.weights() == fast.f.weights());
  }
}

TEST_CASE("komp_prune with repeated atoms") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance base = random_instance(rng, 6);
    const Index m = base.f.model_order();
    std::uniform_int_distribution<Index> src(0, m - 1);
    Dictionary d = base.f.dict();
    Matrix w(m + 3, base.f.num_classes());
    w.topRows(m) = base.f.weights();
    w.bottomRows(3) = oracle::random_weights(rng, 3, base.f.num_classes());
    for (int r = 0; r < 3; ++r) d.append(Vector(base.f.dict().points().col(src(rng))));
    const KernelExpansion f(base.f.kernel(), d, w);
    const double nf = hilbert_norm(f);
    for (auto strategy : {KompStrategy::reference, KompStrategy::fast}) {
      const PruneResult r = komp_prune(f, {base.epsilon, std::nullopt}, strategy);
      const double err = oracle::distance(r.f, f);
      CHECK(err <= base.epsilon + 1e-8 * (1.0 + nf));
      CHECK(std::abs(err - r.report.final_error) <= 1e-8 * (1.0 + nf));
      // at most one copy of each distinct atom survives
      CHECK(r.f.model_order() <= m);
    }
    const PruneResult exact = komp_prune(f, {0.0, std::nullopt});
    CHECK(exact.f.model_order() == m);
    CHECK(oracle::distance(exact.f, f) <= 1e-12 * (1.0 + nf));
  }
}

TEST_CASE("zero budget on a positive definite gram is the identity") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 1 + trial % 6;
    const KernelSpec k = KernelSpec::gaussian(0.2);
    const KernelExpansion f(k, Dictionary(oracle::random_points(rng, 3, m, 3.0)), oracle::random_weights(rng, m, 2));
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(oracle::gram(k, f.dict().points())).eigenvalues();
    if (ev.minCoeff() < 1e-6) continue;
    const PruneResult r = komp_prune(f, {0.0, std::nullopt});
    CHECK(r.f.model_order() == m);
    CHECK(r.f.weights() == f.weights());
  }
}

TEST_CASE("subspace_distance") {
  const auto k = KernelSpec::gaussian(0.5);
  Dictionary d(2);
  d.append(v2(0, 0));
  d.append(v2(1, 0.5));
  CHECK(subspace_distance(k, d, v2(1, 0.5)) == doctest::Approx(0.0));
  CHECK(subspace_distance(k, Dictionary(2), v2(3, 3)) == 1.0);
  Dictionary origin(2);
  origin.append(v2(0, 0));
  CHECK(subspace_distance(k, origin, v2(1, 0)) == doctest::Approx(std::sqrt(1.0 - std::exp(-2.0))).epsilon(1e-13));
  CHECK_THROWS_AS(subspace_distance(k, origin, Vector::Zero(3)), UsageError);
}

TEST_CASE("newest atom removal error is the scaled subspace distance") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> eta_d(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 1 + trial % 8;
    const KernelSpec k = KernelSpec::gaussian(0.8);
    const LossKind loss = LossKind::multi_logistic(3);
    const KernelExpansion f(k, Dictionary(oracle::random_points(rng, 2, m, 2.0)), oracle::random_weights(rng, m, 3));
    const Sample s{oracle::random_points(rng, 2, 1, 2.0).col(0), 1 + trial % 3};
    const double eta = eta_d(rng);
    const KernelExpansion cand = fsgd_candidate(f, std::span<const Sample>(&s, 1), eta, 0.1, loss);
    const double lprime = loss_and_grad(loss, evaluate(f, s.x), s.y).grad.norm();
    const double want = eta * lprime * subspace_distance(k, f.dict(), s.x);
    CHECK(std::abs(removal_error(cand, m) - want) <= 1e-8 * want);
  }
}
