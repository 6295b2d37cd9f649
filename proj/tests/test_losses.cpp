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
#include "polk/dataset.hpp"
#include "polk/errors.hpp"
#include "polk/losses.hpp"

using namespace polk;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

LossKind kind_for(int which, int classes) {
  switch (which) {
    case 0: return LossKind::multi_hinge(classes);
    case 1: return LossKind::multi_logistic(classes);
    default: return LossKind::binary_logistic();
  }
}

Vector random_scores(std::mt19937_64& rng, Index c) {
  std::normal_distribution<double> n(0.0, 2.0);
  Vector s(c);
  for (Index i = 0; i < c; ++i) s(i) = n(rng);
  return s;
}

int random_label(std::mt19937_64& rng, const LossKind& k) {
  if (k.is_binary()) return static_cast<int>(rng() % 2);
  return 1 + static_cast<int>(rng() % static_cast<unsigned>(k.num_classes()));
}

}  // namespace

TEST_CASE("loss kinds") {
  CHECK_THROWS_AS(LossKind::multi_hinge(1), UsageError);
  CHECK_THROWS_AS(LossKind::multi_logistic(0), UsageError);
  CHECK(LossKind::binary_logistic().num_classes() == 1);
  CHECK(LossKind::binary_logistic().valid_label(0));
  CHECK(!LossKind::binary_logistic().valid_label(2));
  CHECK(!LossKind::multi_hinge(3).valid_label(0));
  CHECK(LossKind::multi_hinge(3).valid_label(3));
  CHECK(parse_loss_family(to_string(LossFamily::multi_logistic)) == LossFamily::multi_logistic);
  CHECK_THROWS_AS(parse_loss_family("square"), UsageError);
}

TEST_CASE("loss examples") {
  const LossGrad lg = loss_and_grad(LossKind::multi_logistic(5), Vector::Zero(5), 3);
  CHECK(lg.value == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  for (Index c = 0; c < 5; ++c) CHECK(lg.grad(c) == doctest::Approx(c == 2 ? -0.8 : 0.2).epsilon(1e-15));

  const LossGrad h0 = loss_and_grad(LossKind::multi_hinge(3), vec({5, 0, 0}), 1);
  CHECK(h0.value == 0.0);
  CHECK(h0.grad == Vector::Zero(3));

  const LossGrad h1 = loss_and_grad(LossKind::multi_hinge(3), vec({0.2, 0.5, -0.1}), 2);
  CHECK(h1.value == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(h1.grad == vec({1, -1, 0}));

  // ties in the rival class go to the smallest index
  const LossGrad tie = loss_and_grad(LossKind::multi_hinge(3), vec({0, 0, 0}), 3);
  CHECK(tie.grad == vec({1, 0, -1}));

  const auto b = LossKind::binary_logistic();
  CHECK(loss_and_grad(b, vec({0}), 1).grad(0) == 0.5);
  CHECK(loss_and_grad(b, vec({0}), 0).grad(0) == -0.5);
  CHECK(loss_and_grad(b, vec({0}), 0).value == doctest::Approx(std::log(2.0)));
  // -log P(y|x) with P(y=0|x) = sigma(f)
  CHECK(loss_and_grad(b, vec({1.3}), 0).value == doctest::Approx(-std::log(1.0 / (1.0 + std::exp(-1.3)))));
  CHECK(loss_and_grad(b, vec({1.3}), 1).value == doctest::Approx(-std::log(1.0 - 1.0 / (1.0 + std::exp(-1.3)))));

  CHECK_THROWS_AS(loss_and_grad(LossKind::multi_hinge(3), vec({0, 0, 0}), 4), UsageError);
  CHECK_THROWS_AS(loss_and_grad(b, vec({0}), 2), UsageError);
  CHECK_THROWS_AS(loss_and_grad(LossKind::multi_hinge(3), vec({0, 0}), 1), UsageError);
}

TEST_CASE("extreme scores stay finite") {
  const LossGrad a = loss_and_grad(LossKind::multi_logistic(3), vec({1000, -1000, 0}), 2);
  CHECK(std::isfinite(a.value));
  CHECK(a.value == doctest::Approx(2000.0));
  CHECK(a.grad.allFinite());
  const LossGrad b = loss_and_grad(LossKind::binary_logistic(), vec({800}), 1);
  CHECK(b.value == doctest::Approx(800.0));
  CHECK(loss_and_grad(LossKind::binary_logistic(), vec({-800}), 1).value == doctest::Approx(0.0));
}

TEST_CASE("gradients match central differences") {
  std::mt19937_64 rng(21);
  const double h = 1e-6;
  for (int which = 0; which < 3; ++which) {
    int done = 0;
    while (done < 100) {
      const LossKind k = kind_for(which, 2 + done % 4);
      const Vector s = random_scores(rng, k.num_classes());
      const int y = random_label(rng, k);
      if (which == 0) {
        // stay away from the hinge kinks, where no derivative exists
        Vector others = s;
        others(y - 1) = -INFINITY;
        Index r = 0;
        const double top = others.maxCoeff(&r);
        others(r) = -INFINITY;
        if (std::abs(1.0 + top - s(y - 1)) < 1e-3 || top - others.maxCoeff() < 1e-3) continue;
      }
      const LossGrad lg = loss_and_grad(k, s, y);
      for (Index c = 0; c < s.size(); ++c) {
        Vector up = s, down = s;
        up(c) += h;
        down(c) -= h;
        const double fd = (loss_and_grad(k, up, y).value - loss_and_grad(k, down, y).value) / (2.0 * h);
        if (lg.grad(c) == 0.0) {
          CHECK(std::abs(fd) <= 1e-5);
        } else {
          CHECK(std::abs(fd - lg.grad(c)) <= 1e-5 * std::abs(lg.grad(c)));
        }
      }
      ++done;
    }
  }
}

TEST_CASE("loss properties") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 600; ++trial) {
    const LossKind k = kind_for(trial % 3, 2 + trial % 5);
    const Vector a = random_scores(rng, k.num_classes()), b = random_scores(rng, k.num_classes());
    const int y = random_label(rng, k);
    const double alpha = u(rng);
    const double mixed = loss_and_grad(k, alpha * a + (1 - alpha) * b, y).value;
    CHECK(mixed <= alpha * loss_and_grad(k, a, y).value + (1 - alpha) * loss_and_grad(k, b, y).value + 1e-12);

    const LossGrad lg = loss_and_grad(k, a, y);
    CHECK(lg.grad.allFinite());
    CHECK(lg.grad.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(lg.grad.norm() <= lipschitz_constant(k) * (1.0 + 1e-15));
    if (k.family() == LossFamily::multi_logistic) CHECK(std::abs(lg.grad.sum()) <= 1e-12);
    if (k.family() == LossFamily::multi_hinge) {
      const double shift = 10.0 * (u(rng) - 0.5);
      CHECK(loss_and_grad(k, (a.array() + shift).matrix(), y).value == doctest::Approx(lg.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("prediction") {
  CHECK(predict(LossKind::multi_hinge(3), Vector::Zero(3)) == 1);
  CHECK(predict(LossKind::multi_hinge(3), vec({0.1, 0.9, 0.3})) == 2);
  CHECK(predict(LossKind::binary_logistic(), vec({-2})) == 1);
  CHECK(predict(LossKind::binary_logistic(), vec({2})) == 0);
  CHECK(predict(LossKind::binary_logistic(), vec({0})) == 1);
}

TEST_CASE("regularized risk") {
  std::mt19937_64 rng(23);
  Dataset data;
  data.features = oracle::random_points(rng, 2, 10).transpose();
  for (int n = 0; n < 10; ++n) data.labels.push_back(1 + n % 5);
  data.num_classes = 5;
  const auto k = KernelSpec::gaussian(0.8);
  const auto zero = KernelExpansion::zero(k, 2, 5);
  CHECK(regularized_risk(zero, data, LossKind::multi_logistic(5), 0.3) == doctest::Approx(std::log(5.0)));
  CHECK(regularized_risk(zero, data, LossKind::multi_hinge(5), 0.3) == 1.0);
  CHECK(error_rate_pct(zero, data, LossKind::multi_hinge(5)) == 80.0);

  const KernelExpansion f(k, Dictionary(oracle::random_points(rng, 2, 4)), 0.3 * oracle::random_weights(rng, 4, 5));
  for (const LossKind& loss : {LossKind::multi_logistic(5), LossKind::multi_hinge(5)}) {
    const double lambda = 0.25;
    double sum = 0.0;
    for (int n = 0; n < 10; ++n) {
      const Vector s = oracle::eval(f, data.features.row(n).transpose());
      sum += loss_and_grad(loss, s, data.labels[static_cast<std::size_t>(n)]).value;
    }
    const double want = sum / 10.0 + 0.5 * lambda * oracle::inner(f, f);
    CHECK(regularized_risk(f, data, loss, lambda) == doctest::Approx(want).epsilon(1e-12));
  }

  Dataset empty;
  empty.features = Matrix(0, 2);
  CHECK_THROWS_AS(regularized_risk(zero, empty, LossKind::multi_hinge(5), 0.0), UsageError);
  CHECK_THROWS_AS(regularized_risk(zero, data, LossKind::multi_hinge(5), -1.0), UsageError);
}
