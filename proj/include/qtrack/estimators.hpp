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

#ifndef QTRACK_ESTIMATORS_HPP
#define QTRACK_ESTIMATORS_HPP

#include <stdexcept>
#include <string>

namespace qtrack {

enum class EstimatorKind { Dumiqe, Frugal };

// Indicator convention for the Frugal draws. QuantileTarget fires the up
// step with probability q and the down step with probability 1-q, so the
// equilibrium satisfies P(X <= Q) = q. Literal mirrors the indicators
// (I(q < U) up, I(1-q < U) down); its fixed point is the (1-q)-quantile and
// it is kept only for comparison runs.
enum class FrugalForm { QuantileTarget, Literal };

// Multiplicative update: steps are proportional to the current estimate,
// which keeps the estimator scale-equivariant on positive data. Requires
// q_hat > 0 and lambda * max(q, 1-q) < 1 so the sign never flips.
template <typename Real>
inline void dumiqe_step(Real& q_hat, Real q, Real lambda, Real x) {
  if (x >= q_hat)
    q_hat += lambda * q * q_hat;
  else
    q_hat -= lambda * (Real(1) - q) * q_hat;
}

// Randomized update with step magnitude lambda * {0,1}, independent of the
// data scale. u is a uniform draw on [0,1].
template <typename Real>
inline void frugal_step(Real& q_hat, Real q, Real lambda, Real x, Real u,
                        FrugalForm form = FrugalForm::QuantileTarget) {
  if (x >= q_hat) {
    const bool fire = form == FrugalForm::QuantileTarget ? u <= q : q < u;
    if (fire) q_hat += lambda;
  } else {
    const bool fire =
        form == FrugalForm::QuantileTarget ? u <= Real(1) - q : Real(1) - q < u;
    if (fire) q_hat -= lambda;
  }
}

// One incremental quantile estimator: target probability q, step size
// lambda, current estimate q_hat.
template <typename Real>
struct EstimatorStateT {
  EstimatorKind kind = EstimatorKind::Dumiqe;
  FrugalForm frugal_form = FrugalForm::QuantileTarget;
  Real q{};
  Real lambda{};
  Real q_hat{};

  // Advances the estimate by one sample. Consumes exactly one uniform draw
  // from rng iff kind == Frugal, so replay stays deterministic across kinds.
  template <typename Rng>
  void update(Real x, Rng&& rng) {
    if (kind == EstimatorKind::Dumiqe) {
      dumiqe_step(q_hat, q, lambda, x);
    } else {
      const Real u(rng());
      frugal_step(q_hat, q, lambda, x, u, frugal_form);
    }
  }
};

using EstimatorState = EstimatorStateT<double>;

namespace detail {

template <typename Real>
inline Real max_tail(Real q) {
  const Real one_minus = Real(1) - q;
  return q > one_minus ? q : one_minus;
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace detail

// lambda = 0 is accepted (the update degenerates to the identity); negative
// step sizes are rejected.
template <typename Real>
EstimatorStateT<Real> make_dumiqe(Real q, Real lambda, Real initial_estimate) {
  detail::require(q > Real(0) && q < Real(1),
                  "dumiqe: target probability q must lie in (0,1)");
  detail::require(lambda >= Real(0), "dumiqe: step size lambda must be >= 0");
  detail::require(initial_estimate > Real(0),
                  "dumiqe: initial estimate must be positive (multiplicative updates "
                  "require a positive-valued stream)");
  detail::require(lambda * detail::max_tail(q) < Real(1),
                  "dumiqe: lambda * max(q, 1-q) must be < 1 to preserve positivity");
  return EstimatorStateT<Real>{EstimatorKind::Dumiqe, FrugalForm::QuantileTarget, q,
                               lambda, initial_estimate};
}

template <typename Real>
EstimatorStateT<Real> make_frugal(Real q, Real lambda, Real initial_estimate,
                                  FrugalForm form = FrugalForm::QuantileTarget) {
  detail::require(q > Real(0) && q < Real(1),
                  "frugal: target probability q must lie in (0,1)");
  detail::require(lambda >= Real(0), "frugal: step size lambda must be >= 0");
  return EstimatorStateT<Real>{EstimatorKind::Frugal, form, q, lambda,
                               initial_estimate};
}

}  // namespace qtrack

#endif  // QTRACK_ESTIMATORS_HPP
