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

#ifndef QTRACK_MSE_TRACKING_HPP
#define QTRACK_MSE_TRACKING_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "qtrack/estimators.hpp"

namespace qtrack {

// Weight of the M-th term of an exponentially weighted sum equals 0.01:
// 1 - 0.01^(1/M). The usual way to tie the smoothing weights to a known
// adaptation horizon M.
inline double rule_of_thumb(std::uint64_t m) {
  detail::require(m >= 1, "rule_of_thumb: horizon M must be >= 1");
  return 1.0 - std::pow(0.01, 1.0 / static_cast<double>(m));
}

// Smoothing weights for the five tracking recursions. alpha drives the mean
// of the estimate and wants to be large (0.5 works well); the other four
// smooth much noisier quantities and want to be small, typically
// rule_of_thumb(M) for the relevant horizon.
template <typename Real>
struct SmoothingParamsT {
  Real alpha{0.5};
  Real beta{rule_of_thumb(1000)};
  Real gamma{rule_of_thumb(1000)};
  Real kappa{rule_of_thumb(1000)};
  Real eta{rule_of_thumb(1000)};
};

using SmoothingParams = SmoothingParamsT<double>;

template <typename Real>
SmoothingParamsT<Real> smoothing_from_horizon(std::uint64_t m, Real alpha = Real(0.5)) {
  const Real w(rule_of_thumb(m));
  return SmoothingParamsT<Real>{alpha, w, w, w, w};
}

template <typename Real>
void validate(const SmoothingParamsT<Real>& p) {
  detail::require(p.alpha > Real(0) && p.alpha <= Real(1),
                  "smoothing: alpha must lie in (0,1]");
  detail::require(p.beta > Real(0) && p.beta <= Real(1),
                  "smoothing: beta must lie in (0,1]");
  detail::require(p.gamma > Real(0) && p.gamma <= Real(1),
                  "smoothing: gamma must lie in (0,1]");
  detail::require(p.kappa > Real(0) && p.kappa <= Real(1),
                  "smoothing: kappa must lie in (0,1]");
  detail::require(p.eta > Real(0) && p.eta <= Real(1),
                  "smoothing: eta must lie in (0,1]");
}

// Number of updates after which the slowest of the noisy recursions has
// roughly forgotten its initial value.
template <typename Real>
std::uint64_t warmup_threshold(const SmoothingParamsT<Real>& p) {
  Real w = p.beta;
  if (p.kappa < w) w = p.kappa;
  if (p.eta < w) w = p.eta;
  return static_cast<std::uint64_t>(std::ceil(1.0 / static_cast<double>(w)));
}

// Online estimate of the current tracking MSE of one quantile estimator,
// decomposed as bias^2 + variance. Five exponentially weighted recursions:
//   mu_hat       EWMA of the estimate
//   sigma2_hat   tracked variance of the estimate (cross-product form)
//   qportion_hat EWMA of I(x <= estimate), the portion below the estimate
//   h_hat        EWMA of (qportion_hat - q)^2, the squared-bias proxy
//   gprime_hat   quantile-slope estimate from an auxiliary companion quantile
// None of these touch the raw sample except through the indicator, so the
// estimate inherits the estimator's robustness to outliers.
template <typename Real>
struct MseTrackerT {
  Real mu_hat{};
  Real sigma2_hat{};
  Real qportion_hat{};
  Real h_hat{};
  Real gprime_hat{};
  std::uint64_t n_updates = 0;
  // gprime starts at the first observed slope instead of bleeding in from an
  // arbitrary zero; survives tracker resets that carry the slope over.
  bool gprime_primed = false;

  void update_mean_var(const SmoothingParamsT<Real>& p, Real q_hat_new) {
    const Real mu_prev = mu_hat;
    mu_hat = (Real(1) - p.alpha) * mu_hat + p.alpha * q_hat_new;
    sigma2_hat = (Real(1) - p.beta) * sigma2_hat +
                 p.beta * (q_hat_new - mu_hat) * (q_hat_new - mu_prev);
    if (sigma2_hat < Real(0)) sigma2_hat = Real(0);
  }

  // Indicator compares the sample against the estimate that was current when
  // the sample arrived, i.e. the pre-update estimate.
  void update_bias(const SmoothingParamsT<Real>& p, Real x, Real q_hat_main, Real q) {
    const Real indicator = x <= q_hat_main ? Real(1) : Real(0);
    qportion_hat = (Real(1) - p.gamma) * qportion_hat + p.gamma * indicator;
    const Real dev = qportion_hat - q;
    h_hat = (Real(1) - p.kappa) * h_hat + p.kappa * dev * dev;
  }

  void update_gprime(const SmoothingParamsT<Real>& p, Real q_hat_q, Real q_hat_qtilde,
                     Real q, Real q_tilde) {
    const Real slope = (q_hat_q - q_hat_qtilde) / (q - q_tilde);
    if (!gprime_primed) {
      gprime_hat = slope;
      gprime_primed = true;
    } else {
      gprime_hat = (Real(1) - p.eta) * gprime_hat + p.eta * slope;
    }
  }

  // (gprime)^2 * h + sigma2. Unreliable until is_warm(); callers that gate on
  // warmth get a value that has forgotten initialization.
  Real mse_estimate() const { return gprime_hat * gprime_hat * h_hat + sigma2_hat; }

  bool is_warm(const SmoothingParamsT<Real>& p) const {
    return n_updates >= warmup_threshold(p);
  }
};

using MseTracker = MseTrackerT<double>;

// Shared configuration for one tracked quantile: estimator kind, target q,
// companion probability q_tilde for the slope estimate, smoothing weights.
// Shared across ensemble members so per-member state stays at eight scalars.
template <typename Real>
struct TrackingConfigT {
  EstimatorKind kind = EstimatorKind::Dumiqe;
  FrugalForm frugal_form = FrugalForm::QuantileTarget;
  Real q{0.5};
  Real q_tilde{0.6};
  SmoothingParamsT<Real> smoothing{};
};

using TrackingConfig = TrackingConfigT<double>;

// Companion default: 0.1 away from q, inward from the nearer tail.
template <typename Real>
Real default_companion(Real q) {
  return q <= Real(0.5) ? q + Real(0.1) : q - Real(0.1);
}

template <typename Real>
void validate(const TrackingConfigT<Real>& cfg) {
  detail::require(cfg.q > Real(0) && cfg.q < Real(1),
                  "tracking: q must lie in (0,1)");
  detail::require(cfg.q_tilde > Real(0) && cfg.q_tilde < Real(1),
                  "tracking: q_tilde must lie in (0,1)");
  detail::require(cfg.q != cfg.q_tilde,
                  "tracking: q_tilde must differ from q (the slope estimate divides "
                  "by q - q_tilde)");
  validate(cfg.smoothing);
}

// One unit of the adaptive procedures: main estimator, auxiliary estimator at
// the companion probability (same lambda, same kind), and the MSE tracker.
// Persistent per-sample state is exactly eight scalars -- main and auxiliary
// estimates, the five tracker recursions and lambda -- plus bookkeeping.
template <typename Real>
struct TrackedQuantileT {
  Real main_q_hat{};
  Real aux_q_hat{};
  MseTrackerT<Real> tracker{};
  Real lambda{};

  std::array<Real, 8> persistent_state() const {
    return {main_q_hat,       aux_q_hat,      tracker.mu_hat,
            tracker.sigma2_hat, tracker.qportion_hat, tracker.h_hat,
            tracker.gprime_hat, lambda};
  }
};

using TrackedQuantile = TrackedQuantileT<double>;

template <typename Real>
void validate_lambda(const TrackingConfigT<Real>& cfg, Real lambda) {
  detail::require(lambda >= Real(0), "tracking: lambda must be >= 0");
  if (cfg.kind == EstimatorKind::Dumiqe) {
    detail::require(lambda * detail::max_tail(cfg.q) < Real(1) &&
                        lambda * detail::max_tail(cfg.q_tilde) < Real(1),
                    "tracking: dumiqe requires lambda * max(q, 1-q) < 1 for both the "
                    "target and companion probabilities");
  }
}

// Neutral start: both estimates at the initial value, mean tracker at the
// initial value, portion tracker at its target, variances at zero. The slope
// recursion primes itself on the first update.
template <typename Real>
TrackedQuantileT<Real> make_tracked(const TrackingConfigT<Real>& cfg, Real lambda,
                                    Real initial_estimate) {
  validate(cfg);
  validate_lambda(cfg, lambda);
  if (cfg.kind == EstimatorKind::Dumiqe) {
    detail::require(initial_estimate > Real(0),
                    "tracking: dumiqe requires a positive initial estimate");
  }
  TrackedQuantileT<Real> tq;
  tq.main_q_hat = initial_estimate;
  tq.aux_q_hat = initial_estimate;
  tq.lambda = lambda;
  tq.tracker.mu_hat = initial_estimate;
  tq.tracker.qportion_hat = cfg.q;
  return tq;
}

// Per-sample pipeline, in fixed order: bias recursion against the pre-update
// estimate, both estimator updates, then mean/variance and slope recursions
// on the post-update estimates. Consumes two uniform draws iff kind is
// Frugal (main first, then auxiliary).
template <typename Real, typename Rng>
void tracked_step(TrackedQuantileT<Real>& tq, const TrackingConfigT<Real>& cfg, Real x,
                  Rng&& rng) {
  tq.tracker.update_bias(cfg.smoothing, x, tq.main_q_hat, cfg.q);
  if (cfg.kind == EstimatorKind::Dumiqe) {
    dumiqe_step(tq.main_q_hat, cfg.q, tq.lambda, x);
    dumiqe_step(tq.aux_q_hat, cfg.q_tilde, tq.lambda, x);
  } else {
    const Real u_main(rng());
    frugal_step(tq.main_q_hat, cfg.q, tq.lambda, x, u_main, cfg.frugal_form);
    const Real u_aux(rng());
    frugal_step(tq.aux_q_hat, cfg.q_tilde, tq.lambda, x, u_aux, cfg.frugal_form);
  }
  tq.tracker.update_mean_var(cfg.smoothing, tq.main_q_hat);
  tq.tracker.update_gprime(cfg.smoothing, tq.main_q_hat, tq.aux_q_hat, cfg.q,
                           cfg.q_tilde);
  ++tq.tracker.n_updates;
}

}  // namespace qtrack

#endif  // QTRACK_MSE_TRACKING_HPP
