// Copyright 2026 The qtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>
#include <stdexcept>

#include "qtrack/estimators.hpp"

using namespace qtrack;

TEST_SUITE("estimators") {

TEST_CASE("dumiqe moves up multiplicatively on samples at or above the estimate") {
  double q_hat = 10.0;
  dumiqe_step(q_hat, 0.7, 0.01, 12.0);
  CHECK(q_hat == doctest::Approx(10.07).epsilon(1e-14));

  q_hat = 10.0;
  dumiqe_step(q_hat, 0.7, 0.01, 10.0);  // tie takes the up branch
  CHECK(q_hat == doctest::Approx(10.07).epsilon(1e-14));
}

TEST_CASE("dumiqe moves down multiplicatively on samples below the estimate") {
  double q_hat = 10.0;
  dumiqe_step(q_hat, 0.7, 0.01, 9.0);
  CHECK(q_hat == doctest::Approx(9.97).epsilon(1e-14));
}

TEST_CASE("zero step size freezes the estimate") {
  double q_hat = 10.0;
  dumiqe_step(q_hat, 0.7, 0.0, 1e9);
  CHECK(q_hat == 10.0);
  dumiqe_step(q_hat, 0.7, 0.0, -1e9);
  CHECK(q_hat == 10.0);
}

TEST_CASE("dumiqe update depends only on which side the sample lands") {
  double near = 10.0;
  double far = 10.0;
  dumiqe_step(near, 0.7, 0.01, 10.1);
  dumiqe_step(far, 0.7, 0.01, 1e12);
  CHECK(near == far);
  near = far = 10.0;
  dumiqe_step(near, 0.7, 0.01, 9.9);
  dumiqe_step(far, 0.7, 0.01, 1e-12);
  CHECK(near == far);
}

TEST_CASE("dumiqe stays positive whenever lambda * max(q, 1-q) < 1") {
  // Each step multiplies the estimate by a factor in (0, 1 + lambda*q], so
  // positivity is a per-step property independent of the sample value.
  for (const double q : {0.05, 0.3, 0.5, 0.7, 0.95}) {
    const double lambda = 0.999 / std::max(q, 1.0 - q);
    for (const double start : {1e-12, 1e-3, 1.0, 1e12}) {
      for (const double x : {-1e300, -1.0, 0.0, 1e-300, 1.0, 1e300}) {
        double q_hat = start;
        dumiqe_step(q_hat, q, lambda, x);
        REQUIRE(q_hat > 0.0);
      }
    }
  }
  // Long runs on positive-support data, with lambda close to the validity
  // bound: the estimate keeps mean-reverting to a positive quantile and never
  // decays into the underflow range. (Data whose target quantile is not
  // positive would instead drive the estimate toward zero geometrically, and
  // the product eventually leaves double range; the multiplicative rule is
  // meant for positive data.)
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double q = 0.05 + 0.9 * unit(gen);
    const double lambda = 0.99 * unit(gen) / std::max(q, 1.0 - q);
    double q_hat = 1e-3 + unit(gen);
    for (int i = 0; i < 2000; ++i) {
      dumiqe_step(q_hat, q, lambda, expo(gen));
      REQUIRE(q_hat > 0.0);
    }
  }
}

TEST_CASE("dumiqe trajectories are scale equivariant on positive data") {
  const double scale = 37.5;
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> dist(0.5);
  double plain = 2.0;
  double scaled = 2.0 * scale;
  for (int i = 0; i < 5000; ++i) {
    const double x = dist(gen);
    dumiqe_step(plain, 0.7, 0.05, x);
    dumiqe_step(scaled, 0.7, 0.05, x * scale);
    REQUIRE(scaled == doctest::Approx(plain * scale).epsilon(1e-12));
  }
}

TEST_CASE("frugal steps by lambda when the indicator fires") {
  double q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 6.0, 0.6, FrugalForm::QuantileTarget);  // 0.6 <= q
  CHECK(q_hat == doctest::Approx(5.1));
  q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 6.0, 0.9, FrugalForm::QuantileTarget);  // 0.9 > q
  CHECK(q_hat == 5.0);
  q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 4.0, 0.2, FrugalForm::QuantileTarget);  // 0.2 <= 1-q
  CHECK(q_hat == doctest::Approx(4.9));
  q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 4.0, 0.5, FrugalForm::QuantileTarget);  // 0.5 > 1-q
  CHECK(q_hat == 5.0);
}

TEST_CASE("literal frugal form fires on the complementary draws") {
  double q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 6.0, 0.9, FrugalForm::Literal);  // q < 0.9
  CHECK(q_hat == doctest::Approx(5.1));
  q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 6.0, 0.6, FrugalForm::Literal);
  CHECK(q_hat == 5.0);
  q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 4.0, 0.5, FrugalForm::Literal);  // 1-q < 0.5
  CHECK(q_hat == doctest::Approx(4.9));
  q_hat = 5.0;
  frugal_step(q_hat, 0.7, 0.1, 4.0, 0.2, FrugalForm::Literal);
  CHECK(q_hat == 5.0);
}

// On uniform input the default form settles near the q-quantile while the
// literal orientation settles near the (1-q)-quantile, which is why the
// default is the default.
TEST_CASE("frugal equilibrium lands at q for the default form, 1-q for literal") {
  const double q = 0.7;
  const auto settle = [&](FrugalForm form) {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double q_hat = 0.5;
    for (int i = 0; i < 300000; ++i)
      frugal_step(q_hat, q, 0.001, unit(gen), unit(gen), form);
    return q_hat;
  };
  CHECK(settle(FrugalForm::QuantileTarget) == doctest::Approx(0.7).epsilon(0.08));
  CHECK(settle(FrugalForm::Literal) == doctest::Approx(0.3).epsilon(0.08));
}

TEST_CASE("estimator state updates through the shared entry point") {
  EstimatorState dumiqe = make_dumiqe(0.7, 0.01, 10.0);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rng = [&] { return unit(gen); };
  dumiqe.update(12.0, rng);
  CHECK(dumiqe.q_hat == doctest::Approx(10.07));

  // The frugal path consumes exactly one draw per update.
  EstimatorState frugal = make_frugal(0.7, 0.1, 5.0);
  int draws = 0;
  auto counting_rng = [&] {
    ++draws;
    return 0.0;  // always fires toward the sample side
  };
  frugal.update(6.0, counting_rng);
  CHECK(draws == 1);
  CHECK(frugal.q_hat == doctest::Approx(5.1));
}

TEST_CASE("construction validates its domain") {
  CHECK_THROWS_AS(make_dumiqe(0.0, 0.01, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_dumiqe(1.0, 0.01, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_dumiqe(0.7, -0.01, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_dumiqe(0.7, 0.01, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_dumiqe(0.7, 0.01, -1.0), std::invalid_argument);
  // 1.5 * max(0.7, 0.3) >= 1 would let one update cross zero
  CHECK_THROWS_AS(make_dumiqe(0.7, 1.5, 1.0), std::invalid_argument);
  CHECK_NOTHROW(make_dumiqe(0.7, 1.4, 1.0));
  // additive updates tolerate nonpositive starting points
  CHECK_NOTHROW(make_frugal(0.7, 0.1, -3.0));
  CHECK_THROWS_AS(make_frugal(0.7, -0.1, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
