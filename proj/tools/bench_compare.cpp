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

// Compares the serial reference paths against the OpenMP kernels: oracle
// ensemble advance at several grid sizes and the constant-lambda grid search.
// Also cross-checks that both paths produce identical results, since the
// parallel kernels are only reorderings of independent work.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qtrack/bench.hpp"
#include "qtrack/controllers.hpp"
#include "qtrack/streams.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

qtrack::OracleTracker make_oracle(std::size_t grid_points, bool parallel) {
  qtrack::OracleConfig cfg;
  cfg.lambda_grid = qtrack::default_lambda_grid(
      -7.0, 0.0, 7.0 / static_cast<double>(grid_points - 1));
  cfg.parallel = parallel;
  cfg.tracking.q = 0.7;
  cfg.tracking.q_tilde = 0.6;
  return qtrack::OracleTracker(cfg, 8.0, 42);
}

// Returns samples/s; also reports the final estimate so the work cannot be
// optimized away and the two paths can be compared bit for bit.
double time_oracle(std::size_t grid_points, bool parallel, std::uint64_t n_steps,
                   double* final_estimate) {
  qtrack::OracleTracker oracle = make_oracle(grid_points, parallel);
  qtrack::SyntheticStream stream(qtrack::NormalSineSpec{}, 7);
  const auto start = Clock::now();
  double estimate = 0.0;
  for (std::uint64_t i = 0; i < n_steps; ++i) estimate = oracle.step(stream.next());
  const double elapsed = seconds_since(start);
  *final_estimate = estimate;
  return static_cast<double>(n_steps) / elapsed;
}

double time_grid(bool parallel, std::uint64_t n_steps, double* best_lambda) {
  qtrack::GridOptions options;
  options.parallel = parallel;
  const auto start = Clock::now();
  const qtrack::GridResult grid = qtrack::grid_search_constant_lambda(
      qtrack::NormalSineSpec{}, 0.7, qtrack::default_lambda_grid(), n_steps, {1},
      options);
  const double elapsed = seconds_since(start);
  *best_lambda = grid.best_lambda;
  return static_cast<double>(n_steps) * static_cast<double>(grid.lambdas.size()) /
         elapsed;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("openmp: not compiled in\n");
#endif

  constexpr std::uint64_t kOracleSteps = 200000;
  bool consistent = true;
  for (const std::size_t grid_points : {35ul, 141ul, 564ul}) {
    double est_serial = 0.0;
    double est_omp = 0.0;
    const double serial =
        time_oracle(grid_points, false, kOracleSteps, &est_serial);
    const double omp = time_oracle(grid_points, true, kOracleSteps, &est_omp);
    const bool match = est_serial == est_omp;
    consistent = consistent && match;
    std::printf(
        "oracle L=%4zu serial=%9.0f samples/s omp=%9.0f samples/s "
        "speedup=%.2fx results=%s\n",
        grid_points, serial, omp, omp / serial, match ? "identical" : "DIFFER");
  }

  constexpr std::uint64_t kGridSteps = 200000;
  double best_serial = 0.0;
  double best_omp = 0.0;
  const double serial = time_grid(false, kGridSteps, &best_serial);
  const double omp = time_grid(true, kGridSteps, &best_omp);
  const bool match = best_serial == best_omp;
  consistent = consistent && match;
  std::printf(
      "grid  L= 141 serial=%9.0f cells*steps/s omp=%9.0f cells*steps/s "
      "speedup=%.2fx results=%s\n",
      serial, omp, omp / serial, match ? "identical" : "DIFFER");

  if (!consistent) {
    std::fprintf(stderr, "bench_compare: serial and OpenMP paths disagree\n");
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
