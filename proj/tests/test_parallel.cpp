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

// The OpenMP kernels must be pure reorderings of the serial reference paths:
// every result here is compared bitwise, not approximately.

#include <doctest.h>

#include <array>
#include <vector>

#include "qtrack/controllers.hpp"
#include "qtrack/rng.hpp"
#include "qtrack/streams.hpp"

using namespace qtrack;

TEST_SUITE("parallel") {

TEST_CASE("counter rng: pure function of key, step and slot") {
  const std::uint64_t key = derive_key(42, 7);
  CHECK(counter_uniform(key, 3, 5) == counter_uniform(key, 3, 5));
  CHECK(counter_uniform(key, 3, 5) != counter_uniform(key, 3, 6));
  CHECK(counter_uniform(key, 3, 5) != counter_uniform(key, 4, 5));
  CHECK(counter_uniform(key, 3, 5) != counter_uniform(derive_key(42, 8), 3, 5));
  for (std::uint64_t step = 0; step < 200; ++step)
    for (std::uint64_t slot = 0; slot < 8; ++slot) {
      const double u = counter_uniform(key, step, slot);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
    }
}

TEST_CASE("counter rng draws look uniform") {
  const std::uint64_t key = derive_key(9, 1);
  std::array<int, 10> buckets{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = counter_uniform(key, static_cast<std::uint64_t>(i), 0);
    ++buckets[static_cast<std::size_t>(u * 10.0)];
  }
  for (const int count : buckets) {
    // each bucket expects 10000, sd ~95
    REQUIRE(count > 9400);
    REQUIRE(count < 10600);
  }
}

TEST_CASE("member rng matches direct counter addressing in any order") {
  const std::uint64_t key = derive_key(3, 4);
  MemberRng forward{key, 17, 10, 0};
  std::array<double, 4> direct{};
  for (std::size_t k = 0; k < 4; ++k)
    direct[3 - k] = counter_uniform(key, 17, 10 + (3 - k));
  for (std::size_t k = 0; k < 4; ++k) REQUIRE(forward() == direct[k]);
}

TEST_CASE("counter_uniform_int respects its bound") {
  const std::uint64_t key = derive_key(5, 6);
  std::array<int, 4> seen{};
  for (std::uint64_t i = 0; i < 40000; ++i) {
    const std::uint64_t v = counter_uniform_int(key, i, 3);
    REQUIRE(v <= 3);
    ++seen[v];
  }
  for (const int count : seen) REQUIRE(count > 9000);  // expect ~10000 each
  for (std::uint64_t i = 0; i < 100; ++i)
    REQUIRE(counter_uniform_int(key, i, 0) == 0);
}

TEST_CASE("oracle ensemble: serial and OpenMP advances agree bitwise") {
  for (const EstimatorKind kind : {EstimatorKind::Dumiqe, EstimatorKind::Frugal}) {
    OracleConfig cfg;
    cfg.lambda_grid = default_lambda_grid(-7.0, 0.0, 0.25);
    cfg.tracking.kind = kind;
    cfg.tracking.q = 0.7;
    cfg.tracking.q_tilde = 0.6;
    cfg.parallel = false;
    OracleTracker serial(cfg, 8.0, 21);
    cfg.parallel = true;
    OracleTracker parallel(cfg, 8.0, 21);

    SyntheticStream sa(NormalSineSpec{}, 22);
    SyntheticStream sb(NormalSineSpec{}, 22);
    for (int i = 0; i < 5000; ++i) {
      const double ea = serial.step(sa.next());
      const double eb = parallel.step(sb.next());
      REQUIRE(ea == eb);
      REQUIRE(serial.selected_index() == parallel.selected_index());
    }
    for (std::size_t m = 0; m < serial.members().size(); ++m) {
      const auto a = serial.members()[m].persistent_state();
      const auto b = parallel.members()[m].persistent_state();
      for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == b[k]);
    }
  }
}

TEST_CASE("switching execution mode mid-run changes nothing") {
  OracleConfig cfg;
  cfg.lambda_grid = default_lambda_grid(-7.0, 0.0, 0.5);
  cfg.tracking.kind = EstimatorKind::Frugal;
  cfg.tracking.q = 0.7;
  cfg.tracking.q_tilde = 0.6;
  OracleTracker steady(cfg, 8.0, 31);
  OracleTracker switching(cfg, 8.0, 31);
  SyntheticStream sa(NormalSineSpec{}, 32);
  SyntheticStream sb(NormalSineSpec{}, 32);
  for (int i = 0; i < 2000; ++i) {
    switching.set_parallel(i % 3 == 0);
    REQUIRE(steady.step(sa.next()) == switching.step(sb.next()));
  }
}

}  // TEST_SUITE
