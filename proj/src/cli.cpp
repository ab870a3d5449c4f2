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

#include "qtrack/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "qtrack/bench.hpp"
#include "qtrack/controllers.hpp"
#include "qtrack/streams.hpp"

namespace qtrack {
namespace {

constexpr double kDefaultInitialLambda = 0.030197383422318501;  // exp(-3.5)

enum class ControllerKind { Oracle, Hil, Fixed };

struct StreamOptions {
  std::string family = "normal-sine";
  double mu = 8.0;
  double b = 2.0;
  double sigma = 1.0;
  double nu = 6.0;
  double tau1 = 500.0;
  double tau2 = 10000.0;
  std::uint64_t t_switch = 10000;
  double tau = 0.0;  // > 0 pins both periods (single-regime run)

  StreamSpec to_spec() const {
    StreamSpec spec;
    if (family == "normal-sine")
      spec = NormalSineSpec{mu, b, sigma, tau1, tau2, t_switch};
    else
      spec = ChiSqSineSpec{nu, b, tau1, tau2, t_switch};
    if (tau > 0.0) spec = with_fixed_tau(spec, tau);
    validate(spec);
    return spec;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--stream", family, "Stream family")
        ->check(CLI::IsMember({"normal-sine", "chisq-sine"}))
        ->capture_default_str();
    cmd->add_option("--mu", mu, "Location of the normal stream")->capture_default_str();
    cmd->add_option("--b", b, "Sine amplitude")->capture_default_str();
    cmd->add_option("--sigma", sigma, "Scale of the normal stream")
        ->capture_default_str();
    cmd->add_option("--nu", nu, "Baseline df of the chi-squared stream")
        ->capture_default_str();
    cmd->add_option("--tau1", tau1, "Sine period in the fast regime")
        ->capture_default_str();
    cmd->add_option("--tau2", tau2, "Sine period in the slow regime")
        ->capture_default_str();
    cmd->add_option("--t-switch", t_switch, "Samples per regime segment")
        ->capture_default_str();
    cmd->add_option("--tau", tau, "Pin both periods to one value (0 = off)")
        ->capture_default_str();
  }
};

struct SmoothingOptions {
  double alpha = 0.5;
  std::uint64_t horizon = 0;  // 0 = controller-dependent default
  double weight = 0.0;        // > 0 overrides the horizon rule

  SmoothingParams resolve(std::uint64_t default_horizon) const {
    if (weight > 0.0) return SmoothingParams{alpha, weight, weight, weight, weight};
    return smoothing_from_horizon(horizon > 0 ? horizon : default_horizon, alpha);
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Weight of the mean recursion")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--smoothing-m", horizon,
                    "Horizon for the slow weights, 1 - 0.01^(1/M) "
                    "(0 = controller default)")
        ->capture_default_str();
    cmd->add_option("--smoothing", weight,
                    "Explicit slow weight; overrides --smoothing-m (0 = off)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }
};

struct EstimatorOptions {
  std::string kind = "dumiqe";
  bool literal_frugal = false;

  EstimatorKind to_kind() const {
    return kind == "dumiqe" ? EstimatorKind::Dumiqe : EstimatorKind::Frugal;
  }
  FrugalForm to_form() const {
    return literal_frugal ? FrugalForm::Literal : FrugalForm::QuantileTarget;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--estimator", kind, "Update rule")
        ->check(CLI::IsMember({"dumiqe", "frugal"}))
        ->capture_default_str();
    cmd->add_flag("--frugal-literal", literal_frugal,
                  "Use the diverging frugal indicator orientation");
  }
};

struct TrackArgs {
  StreamOptions stream;
  SmoothingOptions smoothing;
  EstimatorOptions estimator;
  std::string input;
  std::string transform = "none";
  double jitter_resolution = 1.0;
  std::string controller = "oracle";
  double q = 0.7;
  double q_tilde = 0.0;  // 0 = companion rule
  double fixed_lambda = kDefaultInitialLambda;
  double log_min = -7.0;
  double log_max = 0.0;
  double log_step = 0.05;
  bool friction = false;
  bool extend = false;
  bool serial = false;
  double a = 1.5;
  std::uint64_t m_base = 1000;
  std::uint64_t m_jitter = 1000;
  double initial_lambda = kDefaultInitialLambda;
  std::uint64_t n = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t thinning = 1;
  double init = 0.0;  // > 0 overrides first-observation initialization
  std::string out;
};

struct GridArgs {
  StreamOptions stream;
  EstimatorOptions estimator;
  double q = 0.7;
  double log_min = -7.0;
  double log_max = 0.0;
  double log_step = 0.05;
  std::uint64_t grid_points = 0;  // 0 = derive from the log spacing
  std::uint64_t n = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t n_seeds = 1;
  bool serial = false;
  bool mixture = false;
  std::string out;
};

struct SynthArgs {
  StreamOptions stream;
  double q = 0.7;
  std::uint64_t n = 1000000;
  std::uint64_t seed = 1;
  std::string out;
};

TrackingConfig make_tracking(const EstimatorOptions& est, double q, double q_tilde,
                             const SmoothingOptions& smoothing,
                             std::uint64_t default_horizon) {
  TrackingConfig cfg;
  cfg.kind = est.to_kind();
  cfg.frugal_form = est.to_form();
  cfg.q = q;
  cfg.q_tilde = q_tilde > 0.0 ? q_tilde : default_companion(q);
  cfg.smoothing = smoothing.resolve(default_horizon);
  validate(cfg);
  return cfg;
}

std::vector<double> build_grid(double log_min, double log_max, double log_step,
                               std::uint64_t points) {
  if (points == 0) return default_lambda_grid(log_min, log_max, log_step);
  if (points == 1) return {std::exp(log_min)};
  std::vector<double> grid;
  grid.reserve(points);
  const double step = (log_max - log_min) / static_cast<double>(points - 1);
  for (std::uint64_t i = 0; i < points; ++i)
    grid.push_back(std::exp(log_min + step * static_cast<double>(i)));
  return grid;
}

// Runs the controller over either the synthetic stream or the preloaded
// buffer and reports one summary line.
template <typename Controller>
int run_track_with(Controller& ctrl, const TrackArgs& args,
                   std::optional<SyntheticStream>& stream,
                   const std::vector<double>& xs) {
  const auto start = std::chrono::steady_clock::now();
  TrackingTrace trace;
  if (stream)
    trace = run_tracking(ctrl, *stream, args.q, args.n, args.thinning);
  else
    trace = run_tracking(ctrl, std::span<const double>(xs),
                         std::span<const double>{}, args.thinning);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  write_trace_csv(args.out, trace);
  const double rate = static_cast<double>(trace.n_steps) /
                      std::max(elapsed.count(), 1e-9);
  if (std::isnan(trace.observed_mse))
    std::printf("track: n=%llu observed_mse=n/a final_lambda=%.6g "
                "runtime_s=%.3f samples_per_s=%.3g\n",
                static_cast<unsigned long long>(trace.n_steps),
                ctrl.current_lambda(), elapsed.count(), rate);
  else
    std::printf("track: n=%llu observed_mse=%.6g final_lambda=%.6g "
                "runtime_s=%.3f samples_per_s=%.3g\n",
                static_cast<unsigned long long>(trace.n_steps), trace.observed_mse,
                ctrl.current_lambda(), elapsed.count(), rate);
  return 0;
}

int cmd_track(const TrackArgs& args) {
  std::optional<SyntheticStream> stream;
  std::vector<double> xs;
  double first_observation = 0.0;

  if (!args.input.empty()) {
    xs = read_timestamp_file(args.input);
    if (args.transform == "rate") {
      RateSeries rates = rates_from_timestamps(std::move(xs), args.jitter_resolution,
                                               derive_key(args.seed, 2));
      if (rates.dropped > 0)
        std::fprintf(stderr, "track: dropped %zu zero gaps\n", rates.dropped);
      xs = std::move(rates.rates);
    }
    if (xs.empty()) throw std::runtime_error("track: input produced no samples");
    first_observation = xs.front();
  } else {
    stream.emplace(args.stream.to_spec(), args.seed);
    SyntheticStream peek = *stream;  // init from sample 1 without consuming it
    first_observation = peek.next();
  }

  const double init = args.init > 0.0 ? args.init : first_observation;
  const std::uint64_t hil_horizon = args.m_base + args.m_jitter / 2;
  ControllerKind kind = ControllerKind::Oracle;
  if (args.controller == "hil")
    kind = ControllerKind::Hil;
  else if (args.controller == "fixed")
    kind = ControllerKind::Fixed;

  if (kind == ControllerKind::Oracle) {
    OracleConfig cfg;
    cfg.lambda_grid = default_lambda_grid(args.log_min, args.log_max, args.log_step);
    cfg.friction = args.friction;
    cfg.extend_grid = args.extend;
    cfg.parallel = !args.serial;
    cfg.tracking =
        make_tracking(args.estimator, args.q, args.q_tilde, args.smoothing, 1000);
    OracleTracker ctrl(cfg, init, args.seed);
    return run_track_with(ctrl, args, stream, xs);
  }
  if (kind == ControllerKind::Hil) {
    HilConfig cfg;
    cfg.a = args.a;
    cfg.m_base = args.m_base;
    cfg.m_jitter = args.m_jitter;
    cfg.initial_lambda = args.initial_lambda;
    cfg.tracking = make_tracking(args.estimator, args.q, args.q_tilde, args.smoothing,
                                 hil_horizon);
    HilTracker ctrl(cfg, init, args.seed);
    return run_track_with(ctrl, args, stream, xs);
  }
  TrackingConfig tracking =
      make_tracking(args.estimator, args.q, args.q_tilde, args.smoothing, 1000);
  validate_lambda(tracking, args.fixed_lambda);
  FixedTracker ctrl(tracking, args.fixed_lambda, init, args.seed);
  return run_track_with(ctrl, args, stream, xs);
}

int cmd_grid(const GridArgs& args) {
  GridOptions options;
  options.kind = args.estimator.to_kind();
  options.frugal_form = args.estimator.to_form();
  options.parallel = !args.serial;
  const std::vector<double> lambdas =
      build_grid(args.log_min, args.log_max, args.log_step, args.grid_points);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < std::max<std::uint64_t>(1, args.n_seeds); ++i)
    seeds.push_back(args.seed + i);

  const StreamSpec spec = args.stream.to_spec();
  const auto start = std::chrono::steady_clock::now();
  const GridResult grid =
      grid_search_constant_lambda(spec, args.q, lambdas, args.n, seeds, options);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  write_grid_csv(args.out, grid);
  std::printf("grid: best_lambda=%.6g mse=%.6g n_lambdas=%zu seeds=%zu "
              "runtime_s=%.3f\n",
              grid.best_lambda, grid.best_mse, grid.lambdas.size(), seeds.size(),
              elapsed.count());

  if (args.mixture) {
    const MixtureResult mix =
        mixture_grid_search(spec, args.q, lambdas, args.n, seeds, options);
    std::printf("mixture: regime1_best_lambda=%.6g regime1_mse=%.6g\n",
                mix.regime1.best_lambda, mix.regime1.best_mse);
    std::printf("mixture: regime2_best_lambda=%.6g regime2_mse=%.6g\n",
                mix.regime2.best_lambda, mix.regime2.best_mse);
    std::printf("mixture: mixed_best_lambda=%.6g mixed_mse=%.6g\n", mix.best_lambda,
                mix.best_mse);
  }
  return 0;
}

int cmd_synth(const SynthArgs& args) {
  const StreamSpec spec = args.stream.to_spec();
  SyntheticStream stream(spec, args.seed);
  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot write samples file: " + args.out);
  out << "n,x,true_q\n";
  for (std::uint64_t i = 0; i < args.n; ++i) {
    const double x = stream.next();
    out << stream.position() << ',' << format_g17(x) << ','
        << format_g17(stream.true_quantile(args.q)) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + args.out);
  std::printf("synth: wrote %llu rows\n", static_cast<unsigned long long>(args.n));
  return 0;
}

void add_quantile_flag(CLI::App* cmd, double& q) {
  cmd->add_option("--q", q, "Target quantile probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

void add_common_run_flags(CLI::App* cmd, std::uint64_t& n, std::uint64_t& seed,
                          std::string& out) {
  cmd->add_option("--n", n, "Number of samples")->capture_default_str();
  cmd->add_option("--seed", seed, "Master RNG seed")
      ->envname("QTRACK_SEED")
      ->capture_default_str();
  cmd->add_option("--out", out, "Output CSV path")->required();
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"qtrack: streaming quantile tracking with adaptive step sizes"};
  app.require_subcommand(1);

  TrackArgs track;
  GridArgs grid;
  SynthArgs synth;

  CLI::App* track_cmd =
      app.add_subcommand("track", "Track a quantile and write a trace CSV");
  track.stream.add_flags(track_cmd);
  track.smoothing.add_flags(track_cmd);
  track.estimator.add_flags(track_cmd);
  track_cmd->add_option("--input", track.input,
                        "Read samples (or timestamps) from this file instead of "
                        "a synthetic stream")
      ->check(CLI::ExistingFile);
  track_cmd->add_option("--transform", track.transform,
                        "Input transform: none = raw samples, rate = reciprocal "
                        "inter-arrival times of timestamps")
      ->check(CLI::IsMember({"none", "rate"}))
      ->capture_default_str();
  track_cmd->add_option("--jitter-resolution", track.jitter_resolution,
                        "Timestamp recording resolution in seconds; uniform "
                        "jitter of this width breaks ties")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  track_cmd->add_option("--controller", track.controller, "Step-size controller")
      ->check(CLI::IsMember({"oracle", "hil", "fixed"}))
      ->capture_default_str();
  add_quantile_flag(track_cmd, track.q);
  track_cmd->add_option("--q-tilde", track.q_tilde,
                        "Companion quantile for the slope estimate (0 = q+-0.1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  track_cmd->add_option("--lambda", track.fixed_lambda,
                        "Step size for the fixed controller")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track_cmd->add_option("--log-min", track.log_min, "Oracle grid: lowest log lambda")
      ->capture_default_str();
  track_cmd->add_option("--log-max", track.log_max, "Oracle grid: highest log lambda")
      ->capture_default_str();
  track_cmd->add_option("--log-step", track.log_step, "Oracle grid: log spacing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track_cmd->add_flag("--friction", track.friction,
                      "Limit oracle selection moves to neighbouring grid indices");
  track_cmd->add_flag("--extend", track.extend,
                      "Let the oracle grow the grid past its boundaries");
  track_cmd->add_flag("--serial", track.serial,
                      "Advance ensemble members serially (no OpenMP)");
  track_cmd->add_option("--a", track.a, "HIL ratio between neighbouring lambdas")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track_cmd->add_option("--m-base", track.m_base, "HIL base rebalance period")
      ->capture_default_str();
  track_cmd->add_option("--m-jitter", track.m_jitter,
                        "HIL period jitter: period = m-base + uniform{0..m-jitter}")
      ->capture_default_str();
  track_cmd->add_option("--initial-lambda", track.initial_lambda,
                        "HIL starting center lambda")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track_cmd->add_option("--init", track.init,
                        "Initial estimate (0 = use the first observation)")
      ->capture_default_str();
  track_cmd->add_option("--thinning", track.thinning, "Record every k-th step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common_run_flags(track_cmd, track.n, track.seed, track.out);

  CLI::App* grid_cmd = app.add_subcommand(
      "grid", "Constant-lambda grid search and write per-cell MSEs");
  grid.stream.add_flags(grid_cmd);
  grid.estimator.add_flags(grid_cmd);
  add_quantile_flag(grid_cmd, grid.q);
  grid_cmd->add_option("--log-min", grid.log_min, "Lowest log lambda")
      ->capture_default_str();
  grid_cmd->add_option("--log-max", grid.log_max, "Highest log lambda")
      ->capture_default_str();
  grid_cmd->add_option("--log-step", grid.log_step, "Log spacing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  grid_cmd->add_option("--grid-points", grid.grid_points,
                       "Override: this many log-spaced lambdas (0 = use spacing)")
      ->capture_default_str();
  grid_cmd->add_option("--n-seeds", grid.n_seeds,
                       "Consecutive seeds starting at --seed")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  grid_cmd->add_flag("--serial", grid.serial, "Run grid cells serially (no OpenMP)");
  grid_cmd->add_flag("--mixture", grid.mixture,
                     "Also print the equal-weight two-regime mixture baseline");
  add_common_run_flags(grid_cmd, grid.n, grid.seed, grid.out);

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Export stream samples with true quantiles");
  synth.stream.add_flags(synth_cmd);
  add_quantile_flag(synth_cmd, synth.q);
  add_common_run_flags(synth_cmd, synth.n, synth.seed, synth.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (track_cmd->parsed()) return cmd_track(track);
    if (grid_cmd->parsed()) return cmd_grid(grid);
    return cmd_synth(synth);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qtrack: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) { return dispatch(argc, argv); }

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qtrack");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qtrack
