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

#include "qtrack/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qtrack/quantile_functions.hpp"

namespace qtrack {
namespace {

// True q-quantile per stream position with the expensive pieces hoisted out:
// the normal quantile offset is position independent, and the chi-squared
// quantile repeats with the regime cycle whenever both sine periods divide
// it, which holds for the default parameters.
class TruthEvaluator {
 public:
  TruthEvaluator(const StreamSpec& spec, double q) : spec_(spec), q_(q) {
    if (const auto* normal = std::get_if<NormalSineSpec>(&spec_)) {
      z_offset_ = normal->sigma * inv_norm_cdf(q);
      return;
    }
    const auto& chisq = std::get<ChiSqSineSpec>(spec_);
    const double period = 2.0 * static_cast<double>(chisq.t_switch);
    if (std::fmod(period, chisq.tau1) == 0.0 && std::fmod(period, chisq.tau2) == 0.0) {
      table_.resize(static_cast<std::size_t>(period));
      for (std::size_t r = 0; r < table_.size(); ++r)
        table_[r] = true_quantile(chisq, static_cast<std::uint64_t>(r), q_);
    }
  }

  double operator()(std::uint64_t n) const {
    if (const auto* normal = std::get_if<NormalSineSpec>(&spec_))
      return mean_at(*normal, n) + z_offset_;
    if (!table_.empty()) return table_[n % table_.size()];
    return true_quantile(spec_, n, q_);
  }

 private:
  StreamSpec spec_;
  double q_ = 0;
  double z_offset_ = 0;
  std::vector<double> table_;
};

// One constant-lambda cell: run the bare estimator over the shared buffers
// and average the squared error after warmup. samples[0] seeds the estimate;
// samples[i] for i >= 1 is the observation at position i + 1.
double run_cell(EstimatorKind kind, FrugalForm form, double q, double lambda,
                std::span<const double> samples, std::span<const double> uniforms,
                const TruthEvaluator& truth_at, std::uint64_t n_steps) {
  double q_hat = samples[0];
  const std::uint64_t warmup = warmup_steps(n_steps);
  double acc = 0.0;
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < n_steps; ++i) {
    const double x = samples[i + 1];
    if (kind == EstimatorKind::Dumiqe)
      dumiqe_step(q_hat, q, lambda, x);
    else
      frugal_step(q_hat, q, lambda, x, uniforms[i], form);
    if (i >= warmup) {
      const double err = q_hat - truth_at(i + 2);
      acc += err * err;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

void finalize(GridResult& grid) {
  const std::size_t n_lambda = grid.lambdas.size();
  grid.mean_mse.assign(n_lambda, 0.0);
  for (const auto& row : grid.per_seed)
    for (std::size_t l = 0; l < n_lambda; ++l) grid.mean_mse[l] += row[l];
  for (double& m : grid.mean_mse) m /= static_cast<double>(grid.per_seed.size());
  grid.best_index = static_cast<std::size_t>(
      std::min_element(grid.mean_mse.begin(), grid.mean_mse.end()) -
      grid.mean_mse.begin());
  grid.best_lambda = grid.lambdas[grid.best_index];
  grid.best_mse = grid.mean_mse[grid.best_index];
}

}  // namespace

double observed_mse(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size())
    throw std::invalid_argument("observed_mse: length mismatch");
  if (estimates.empty()) throw std::invalid_argument("observed_mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double err = estimates[i] - truths[i];
    acc += err * err;
  }
  return acc / static_cast<double>(estimates.size());
}

GridResult grid_search_constant_lambda(const StreamSpec& spec, double q,
                                       const std::vector<double>& lambdas,
                                       std::uint64_t n_steps,
                                       const std::vector<std::uint64_t>& seeds,
                                       const GridOptions& options) {
  validate(spec);
  detail::require(q > 0.0 && q < 1.0, "grid: q must lie in (0, 1)");
  detail::require(!lambdas.empty(), "grid: need at least one lambda");
  detail::require(!seeds.empty(), "grid: need at least one seed");
  detail::require(n_steps >= 100, "grid: need at least 100 steps");
  if (options.kind == EstimatorKind::Dumiqe)
    for (const double lambda : lambdas)
      detail::require(lambda * detail::max_tail(q) < 1.0,
                      "grid: lambda too large for multiplicative updates at this q");

  GridResult grid;
  grid.lambdas = lambdas;
  grid.seeds = seeds;
  grid.n_steps = n_steps;
  grid.per_seed.reserve(seeds.size());

  const TruthEvaluator truth_at(spec, q);
  std::vector<double> samples(n_steps + 1);
  std::vector<double> uniforms;
  if (options.kind == EstimatorKind::Frugal) uniforms.resize(n_steps);

  for (const std::uint64_t seed : seeds) {
    SyntheticStream stream(spec, seed);
    for (double& s : samples) s = stream.next();
    if (options.kind == EstimatorKind::Frugal) {
      std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (double& u : uniforms) u = unit(gen);
    }

    std::vector<double> row(lambdas.size());
    const auto n_lambda = static_cast<std::int64_t>(lambdas.size());
    if (options.parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (std::int64_t l = 0; l < n_lambda; ++l)
        row[static_cast<std::size_t>(l)] =
            run_cell(options.kind, options.frugal_form, q, lambdas[l], samples,
                     uniforms, truth_at, n_steps);
    } else {
      for (std::int64_t l = 0; l < n_lambda; ++l)
        row[static_cast<std::size_t>(l)] =
            run_cell(options.kind, options.frugal_form, q, lambdas[l], samples,
                     uniforms, truth_at, n_steps);
    }
    grid.per_seed.push_back(std::move(row));
  }

  finalize(grid);
  return grid;
}

MixtureResult mixture_grid_search(const StreamSpec& spec, double q,
                                  const std::vector<double>& lambdas,
                                  std::uint64_t n_steps,
                                  const std::vector<std::uint64_t>& seeds,
                                  const GridOptions& options) {
  const double tau1 = std::visit([](const auto& s) { return s.tau1; }, spec);
  const double tau2 = std::visit([](const auto& s) { return s.tau2; }, spec);
  MixtureResult mix;
  mix.regime1 =
      grid_search_constant_lambda(with_fixed_tau(spec, tau1), q, lambdas, n_steps,
                                  seeds, options);
  mix.regime2 =
      grid_search_constant_lambda(with_fixed_tau(spec, tau2), q, lambdas, n_steps,
                                  seeds, options);
  mix.mixed_mean.resize(lambdas.size());
  for (std::size_t l = 0; l < lambdas.size(); ++l)
    mix.mixed_mean[l] = 0.5 * mix.regime1.mean_mse[l] + 0.5 * mix.regime2.mean_mse[l];
  mix.best_index = static_cast<std::size_t>(
      std::min_element(mix.mixed_mean.begin(), mix.mixed_mean.end()) -
      mix.mixed_mean.begin());
  mix.best_lambda = lambdas[mix.best_index];
  mix.best_mse = mix.mixed_mean[mix.best_index];
  return mix;
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_trace_csv(const std::string& path, const TrackingTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "n,x,estimate,lambda,mse_hat,true_q,sq_err\n";
  for (const TraceRecord& r : trace.records)
    out << r.n << ',' << format_g17(r.x) << ',' << format_g17(r.estimate) << ','
        << format_g17(r.lambda) << ',' << format_g17(r.mse_hat) << ','
        << format_g17(r.true_q) << ',' << format_g17(r.sq_err) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_grid_csv(const std::string& path, const GridResult& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file: " + path);
  out << "lambda,mse,n_steps,seed\n";
  for (std::size_t s = 0; s < grid.seeds.size(); ++s)
    for (std::size_t l = 0; l < grid.lambdas.size(); ++l)
      out << format_g17(grid.lambdas[l]) << ',' << format_g17(grid.per_seed[s][l])
          << ',' << grid.n_steps << ',' << grid.seeds[s] << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qtrack
