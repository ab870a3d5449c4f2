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

#ifndef QTRACK_BENCH_HPP
#define QTRACK_BENCH_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qtrack/estimators.hpp"
#include "qtrack/streams.hpp"

namespace qtrack {

// Mean of (estimate - truth)^2 over the full overlap. Throws on length
// mismatch or empty input.
double observed_mse(std::span<const double> estimates, std::span<const double> truths);

struct TraceRecord {
  std::uint64_t n = 0;  // stream position, counted from 1
  double x = 0;
  double estimate = 0;
  double lambda = 0;
  double mse_hat = 0;
  double true_q = 0;  // NaN when no ground truth is known
  double sq_err = 0;  // NaN when no ground truth is known
};

struct TrackingTrace {
  std::vector<TraceRecord> records;  // every thinning-th step
  // Mean squared error against the truth, excluding the first 1% of steps
  // so the initial transient does not dominate short runs. NaN without truth.
  double observed_mse = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t n_steps = 0;
};

inline std::uint64_t warmup_steps(std::uint64_t n_steps) {
  return std::max<std::uint64_t>(1, n_steps / 100);
}

// Drives any controller with step(x)/current_lambda()/current_mse() over a
// synthetic stream, recording every thinning-th step.
template <typename Controller>
TrackingTrace run_tracking(Controller& ctrl, SyntheticStream& stream, double q,
                           std::uint64_t n_steps, std::uint64_t thinning = 1) {
  detail::require(n_steps >= 1, "run_tracking: need at least one step");
  detail::require(thinning >= 1, "run_tracking: thinning must be >= 1");
  TrackingTrace trace;
  trace.n_steps = n_steps;
  trace.records.reserve(static_cast<std::size_t>((n_steps + thinning - 1) / thinning));
  const std::uint64_t warmup = warmup_steps(n_steps);
  double acc = 0.0;
  std::uint64_t acc_count = 0;
  for (std::uint64_t i = 0; i < n_steps; ++i) {
    const double x = stream.next();
    const double est = ctrl.step(x);
    const double truth = stream.true_quantile(q);
    const double err = est - truth;
    if (i >= warmup) {
      acc += err * err;
      ++acc_count;
    }
    if (i % thinning == 0)
      trace.records.push_back({stream.position(), x, est, ctrl.current_lambda(),
                               ctrl.current_mse(), truth, err * err});
  }
  if (acc_count > 0) trace.observed_mse = acc / static_cast<double>(acc_count);
  return trace;
}

// Same loop over a preloaded sample buffer, optionally with matching truths
// (empty means unknown; the trace then carries NaN truth columns).
template <typename Controller>
TrackingTrace run_tracking(Controller& ctrl, std::span<const double> xs,
                           std::span<const double> truths, std::uint64_t thinning = 1) {
  detail::require(!xs.empty(), "run_tracking: need at least one sample");
  detail::require(truths.empty() || truths.size() == xs.size(),
                  "run_tracking: truths must be empty or match samples");
  detail::require(thinning >= 1, "run_tracking: thinning must be >= 1");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  TrackingTrace trace;
  trace.n_steps = xs.size();
  trace.records.reserve((xs.size() + thinning - 1) / thinning);
  const std::uint64_t warmup = warmup_steps(xs.size());
  double acc = 0.0;
  std::uint64_t acc_count = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double est = ctrl.step(xs[i]);
    double truth = nan;
    double sq = nan;
    if (!truths.empty()) {
      truth = truths[i];
      const double err = est - truth;
      sq = err * err;
      if (i >= warmup) {
        acc += sq;
        ++acc_count;
      }
    }
    if (i % thinning == 0)
      trace.records.push_back({static_cast<std::uint64_t>(i + 1), xs[i], est,
                               ctrl.current_lambda(), ctrl.current_mse(), truth, sq});
  }
  if (acc_count > 0) trace.observed_mse = acc / static_cast<double>(acc_count);
  return trace;
}

struct GridOptions {
  EstimatorKind kind = EstimatorKind::Dumiqe;
  FrugalForm frugal_form = FrugalForm::QuantileTarget;
  bool parallel = true;  // OpenMP over grid cells
};

struct GridResult {
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  // per_seed[s][l]: observed MSE of the constant-lambda run for seeds[s] and
  // lambdas[l], first 1% of steps excluded.
  std::vector<std::vector<double>> per_seed;
  std::vector<double> mean_mse;  // over seeds, per lambda
  std::size_t best_index = 0;    // argmin of mean_mse
  double best_lambda = 0;
  double best_mse = 0;
  std::uint64_t n_steps = 0;
};

// Observed MSE of a plain constant-lambda estimator for every grid cell.
// Each seed draws one shared sample buffer (and one shared uniform buffer for
// the frugal estimator), so cells differ only in lambda.
GridResult grid_search_constant_lambda(const StreamSpec& spec, double q,
                                       const std::vector<double>& lambdas,
                                       std::uint64_t n_steps,
                                       const std::vector<std::uint64_t>& seeds,
                                       const GridOptions& options = {});

struct MixtureResult {
  GridResult regime1;  // spec pinned to tau1
  GridResult regime2;  // spec pinned to tau2
  // Equal-weight mixture of the two regimes' mean MSEs per lambda; its
  // minimum is the best any single constant lambda could do if it had to
  // serve both regimes.
  std::vector<double> mixed_mean;
  std::size_t best_index = 0;
  double best_lambda = 0;
  double best_mse = 0;
};

MixtureResult mixture_grid_search(const StreamSpec& spec, double q,
                                  const std::vector<double>& lambdas,
                                  std::uint64_t n_steps,
                                  const std::vector<std::uint64_t>& seeds,
                                  const GridOptions& options = {});

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_g17(double value);

// CSV writers. Both throw std::runtime_error if the file cannot be written.
void write_trace_csv(const std::string& path, const TrackingTrace& trace);
void write_grid_csv(const std::string& path, const GridResult& grid);

}  // namespace qtrack

#endif  // QTRACK_BENCH_HPP
