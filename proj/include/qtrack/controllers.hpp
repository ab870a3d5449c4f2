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

#ifndef QTRACK_CONTROLLERS_HPP
#define QTRACK_CONTROLLERS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qtrack/mse_tracking.hpp"
#include "qtrack/rng.hpp"

namespace qtrack {

// Selection rule shared by the serial and OpenMP oracle paths: argmin of the
// estimated MSE over warm members, ties broken toward the lower index (the
// smaller, smoother lambda). With friction the result moves at most one grid
// position away from `current` per call. Falls back to `current` while no
// member is warm.
template <typename Real>
std::size_t oracle_select(std::span<const Real> mse, std::span<const std::uint8_t> warm,
                          std::size_t current, bool friction) {
  std::size_t best = current;
  bool any_warm = false;
  Real best_mse{};
  for (std::size_t i = 0; i < mse.size(); ++i) {
    if (!warm[i]) continue;
    if (!any_warm || mse[i] < best_mse) {
      any_warm = true;
      best = i;
      best_mse = mse[i];
    }
  }
  if (!any_warm) return current;
  if (friction) {
    if (best + 1 < current)
      best = current - 1;
    else if (best > current + 1)
      best = current + 1;
  }
  return best;
}

template <typename Real>
struct OracleConfigT {
  std::vector<Real> lambda_grid;  // strictly increasing, positive
  bool friction = false;
  bool extend_grid = false;
  std::size_t extend_margin = 1;
  // Factor between consecutive lambdas when extending; 0 means reuse the
  // grid's own ratio.
  Real extend_factor{0};
  Real lambda_min_abs{6.144212353328210e-6};  // exp(-12)
  Real lambda_max_abs{1};
  bool parallel = true;  // advance members with the OpenMP kernel
  TrackingConfigT<Real> tracking{};
};

using OracleConfig = OracleConfigT<double>;

// lambda_l = exp(log_min + log_step * l), covering [exp(log_min), exp(log_max)].
// The default arguments give the 141-point grid exp(-7) ... exp(0).
inline std::vector<double> default_lambda_grid(double log_min = -7.0,
                                               double log_max = 0.0,
                                               double log_step = 0.05) {
  std::vector<double> grid;
  const auto count =
      static_cast<std::size_t>(std::floor((log_max - log_min) / log_step + 0.5)) + 1;
  grid.reserve(count);
  for (std::size_t l = 0; l < count; ++l)
    grid.push_back(std::exp(log_min + log_step * static_cast<double>(l)));
  return grid;
}

template <typename Real>
void validate(const OracleConfigT<Real>& cfg) {
  detail::require(cfg.lambda_grid.size() >= 2,
                  "oracle: lambda grid needs at least two values");
  for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
    detail::require(cfg.lambda_grid[i] > Real(0), "oracle: lambdas must be positive");
    if (i > 0)
      detail::require(cfg.lambda_grid[i - 1] < cfg.lambda_grid[i],
                      "oracle: lambda grid must be strictly increasing");
    validate_lambda(cfg.tracking, cfg.lambda_grid[i]);
  }
  detail::require(!(cfg.extend_factor != Real(0) && cfg.extend_factor <= Real(1)),
                  "oracle: extension factor must exceed 1");
  detail::require(cfg.lambda_min_abs > Real(0) && cfg.lambda_min_abs <= cfg.lambda_max_abs,
                  "oracle: absolute lambda bounds must satisfy 0 < min <= max");
  validate(cfg.tracking);
}

// Ensemble of tracked quantiles over a lambda grid. Every sample advances all
// members; the selection then reads the estimated MSEs and reports the best
// member's estimate without touching any member state. Per-member persistent
// state is eight scalars, so the whole ensemble stores 8L scalars plus O(1)
// bookkeeping and two reusable L-sized scratch buffers for the selection.
template <typename Real>
class OracleTrackerT {
 public:
  OracleTrackerT(OracleConfigT<Real> cfg, Real initial_estimate, std::uint64_t seed)
      : cfg_(std::move(cfg)) {
    validate(cfg_);
    members_.reserve(cfg_.lambda_grid.size());
    for (const Real lambda : cfg_.lambda_grid)
      members_.push_back(make_tracked(cfg_.tracking, lambda, initial_estimate));
    mse_scratch_.resize(members_.size());
    warm_scratch_.resize(members_.size());
    current_index_ = (members_.size() - 1) / 2;  // median member until warm
    frugal_key_ = derive_key(seed, 0x6f7261636cULL);
  }

  // Advances every member on x, reselects, returns the selected estimate.
  Real step(Real x) {
    if (cfg_.parallel)
      advance_members_omp(x);
    else
      advance_members_serial(x);
    ++step_count_;
    current_index_ =
        oracle_select<Real>(mse_scratch_, warm_scratch_, current_index_, cfg_.friction);
    if (cfg_.extend_grid) maybe_extend();
    return members_[current_index_].main_q_hat;
  }

  // Reference member-advance loop, kept serial for testing and benchmarks.
  void advance_members_serial(Real x) {
    const std::size_t n = members_.size();
    for (std::size_t i = 0; i < n; ++i) advance_one(i, x);
  }

  // Members are independent given the counter-addressed draws, so the loop
  // parallelizes without changing any result.
  void advance_members_omp(Real x) {
#ifdef _OPENMP
    const auto n = static_cast<std::int64_t>(members_.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) advance_one(static_cast<std::size_t>(i), x);
#else
    advance_members_serial(x);
#endif
  }

  std::size_t selected_index() const { return current_index_; }
  Real current_lambda() const { return members_[current_index_].lambda; }
  Real current_mse() const { return members_[current_index_].tracker.mse_estimate(); }
  Real current_estimate() const { return members_[current_index_].main_q_hat; }
  bool any_warm() const {
    for (const auto w : warm_scratch_)
      if (w) return true;
    return false;
  }
  std::uint64_t steps() const { return step_count_; }
  const std::vector<TrackedQuantileT<Real>>& members() const { return members_; }
  const OracleConfigT<Real>& config() const { return cfg_; }

  void set_parallel(bool on) { cfg_.parallel = on; }
  void set_friction(bool on) { cfg_.friction = on; }

 private:
  void advance_one(std::size_t i, Real x) {
    MemberRng rng{frugal_key_, step_count_, 2 * i, 0};
    tracked_step(members_[i], cfg_.tracking, x, rng);
    mse_scratch_[i] = members_[i].tracker.mse_estimate();
    warm_scratch_[i] = members_[i].tracker.is_warm(cfg_.tracking.smoothing) ? 1 : 0;
  }

  // Grows the grid geometrically past a boundary the selection is hugging.
  // New members clone the boundary member's full eight-scalar state with the
  // new lambda, so they join mid-flight instead of restarting cold.
  void maybe_extend() {
    const Real ratio = cfg_.extend_factor != Real(0)
                           ? cfg_.extend_factor
                           : cfg_.lambda_grid[1] / cfg_.lambda_grid[0];
    if (current_index_ <= cfg_.extend_margin) {
      const Real lambda = cfg_.lambda_grid.front() / ratio;
      if (lambda >= cfg_.lambda_min_abs && lambda_valid(lambda)) {
        TrackedQuantileT<Real> member = members_.front();
        member.lambda = lambda;
        members_.insert(members_.begin(), member);
        cfg_.lambda_grid.insert(cfg_.lambda_grid.begin(), lambda);
        ++current_index_;
        grow_scratch();
      }
    }
    if (current_index_ + 1 + cfg_.extend_margin >= members_.size()) {
      const Real lambda = cfg_.lambda_grid.back() * ratio;
      if (lambda <= cfg_.lambda_max_abs && lambda_valid(lambda)) {
        TrackedQuantileT<Real> member = members_.back();
        member.lambda = lambda;
        members_.push_back(member);
        cfg_.lambda_grid.push_back(lambda);
        grow_scratch();
      }
    }
  }

  bool lambda_valid(Real lambda) const {
    if (cfg_.tracking.kind != EstimatorKind::Dumiqe) return true;
    return lambda * detail::max_tail(cfg_.tracking.q) < Real(1) &&
           lambda * detail::max_tail(cfg_.tracking.q_tilde) < Real(1);
  }

  void grow_scratch() {
    mse_scratch_.resize(members_.size());
    warm_scratch_.resize(members_.size());
    // refresh so the next selection sees every member
    for (std::size_t i = 0; i < members_.size(); ++i) {
      mse_scratch_[i] = members_[i].tracker.mse_estimate();
      warm_scratch_[i] = members_[i].tracker.is_warm(cfg_.tracking.smoothing) ? 1 : 0;
    }
  }

  OracleConfigT<Real> cfg_;
  std::vector<TrackedQuantileT<Real>> members_;
  std::vector<Real> mse_scratch_;
  std::vector<std::uint8_t> warm_scratch_;
  std::size_t current_index_ = 0;
  std::uint64_t step_count_ = 0;
  std::uint64_t frugal_key_ = 0;
};

using OracleTracker = OracleTrackerT<double>;

template <typename Real>
struct HilConfigT {
  // Ratio between neighbouring lambdas. Large enough that the three
  // estimators behave distinguishably between the rare rebalances.
  Real a{2};
  std::uint64_t m_base = 1000;
  // Rebalance period is m_base + uniform{0..m_jitter}; jitter decorrelates
  // the schedule from periodic patterns in the stream.
  std::uint64_t m_jitter = 0;
  Real initial_lambda{0.030197383422318501};  // exp(-3.5), mid of the default grid
  TrackingConfigT<Real> tracking{};
};

using HilConfig = HilConfigT<double>;

template <typename Real>
void validate(const HilConfigT<Real>& cfg) {
  detail::require(cfg.a > Real(1), "hil: ratio a must exceed 1");
  detail::require(cfg.m_base >= 1, "hil: rebalance period must be >= 1");
  detail::require(cfg.initial_lambda > Real(0), "hil: initial lambda must be positive");
  validate_lambda(cfg.tracking, cfg.initial_lambda * cfg.a);
  validate(cfg.tracking);
}

// Three tracked quantiles at lambda/a, lambda, a*lambda. Every M-ish samples
// the center lambda moves toward the member with the smallest estimated MSE
// and the trio restarts from that member's estimates; if the middle member
// wins, nothing changes. Stores 8*3 scalars plus bookkeeping.
template <typename Real>
class HilTrackerT {
 public:
  static constexpr std::size_t kLow = 0;
  static constexpr std::size_t kMid = 1;
  static constexpr std::size_t kHigh = 2;

  HilTrackerT(HilConfigT<Real> cfg, Real initial_estimate, std::uint64_t seed)
      : cfg_(std::move(cfg)) {
    validate(cfg_);
    center_lambda_ = cfg_.initial_lambda;
    const std::array<Real, 3> lambdas = member_lambdas();
    for (std::size_t i = 0; i < 3; ++i)
      members_[i] = make_tracked(cfg_.tracking, lambdas[i], initial_estimate);
    frugal_key_ = derive_key(seed, 0x68696cULL);
    sched_key_ = derive_key(seed, 0x68696c6aULL);
    next_rebalance_at_ = draw_period();
  }

  Real step(Real x) {
    for (std::size_t i = 0; i < 3; ++i) {
      MemberRng rng{frugal_key_, step_count_, 2 * i, 0};
      tracked_step(members_[i], cfg_.tracking, x, rng);
    }
    ++step_count_;
    ++steps_since_rebalance_;
    if (steps_since_rebalance_ >= next_rebalance_at_) {
      // A rebalance only makes sense once the restarted MSE estimates have
      // converged again; otherwise the slot is skipped.
      if (members_[kMid].tracker.is_warm(cfg_.tracking.smoothing)) rebalance();
      steps_since_rebalance_ = 0;
      ++schedule_draws_;
      next_rebalance_at_ = draw_period();
    }
    return current_estimate();
  }

  // Applies the rebalance rule immediately: shift the center lambda toward
  // the member with the smallest estimated MSE and restart the trio from its
  // estimates, carrying the slope estimate over so the next period's MSE
  // estimates are usable as soon as the noisy recursions have re-warmed.
  void rebalance() {
    rebalanced_once_ = true;
    ++rebalance_count_;
    const std::size_t best = argmin_mse();
    if (best == kMid) return;  // no updates
    const Real factor = best == kLow ? Real(1) / cfg_.a : cfg_.a;
    const Real new_center = center_lambda_ * factor;
    if (!lambda_triple_valid(new_center)) return;  // keep dumiqe updates sane
    const TrackedQuantileT<Real> winner = members_[best];
    center_lambda_ = new_center;
    const std::array<Real, 3> lambdas = member_lambdas();
    for (std::size_t i = 0; i < 3; ++i) {
      TrackedQuantileT<Real>& m = members_[i];
      m.main_q_hat = winner.main_q_hat;
      m.aux_q_hat = winner.aux_q_hat;
      m.lambda = lambdas[i];
      m.tracker = MseTrackerT<Real>{};
      m.tracker.mu_hat = winner.main_q_hat;
      m.tracker.qportion_hat = cfg_.tracking.q;
      m.tracker.gprime_hat = winner.tracker.gprime_hat;
      m.tracker.gprime_primed = winner.tracker.gprime_primed;
    }
  }

  // Middle member until the first rebalance, then the warm member with the
  // smallest estimated MSE (middle again while none is warm).
  Real current_estimate() const { return members_[output_index()].main_q_hat; }
  Real current_lambda() const { return members_[output_index()].lambda; }
  Real current_mse() const { return members_[output_index()].tracker.mse_estimate(); }
  Real center_lambda() const { return center_lambda_; }
  std::uint64_t rebalance_count() const { return rebalance_count_; }
  std::uint64_t steps() const { return step_count_; }
  const std::array<TrackedQuantileT<Real>, 3>& members() const { return members_; }
  TrackedQuantileT<Real>& member(std::size_t i) { return members_[i]; }
  const HilConfigT<Real>& config() const { return cfg_; }

 private:
  std::array<Real, 3> member_lambdas() const {
    return {center_lambda_ / cfg_.a, center_lambda_, center_lambda_ * cfg_.a};
  }

  std::size_t argmin_mse() const {
    std::size_t best = 0;
    Real best_mse = members_[0].tracker.mse_estimate();
    for (std::size_t i = 1; i < 3; ++i) {
      const Real m = members_[i].tracker.mse_estimate();
      if (m < best_mse) {
        best = i;
        best_mse = m;
      }
    }
    return best;
  }

  std::size_t output_index() const {
    if (!rebalanced_once_) return kMid;
    std::size_t best = kMid;
    bool any_warm = false;
    Real best_mse{};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!members_[i].tracker.is_warm(cfg_.tracking.smoothing)) continue;
      const Real m = members_[i].tracker.mse_estimate();
      if (!any_warm || m < best_mse) {
        any_warm = true;
        best = i;
        best_mse = m;
      }
    }
    return best;
  }

  bool lambda_triple_valid(Real center) const {
    if (cfg_.tracking.kind != EstimatorKind::Dumiqe) return true;
    const Real high = center * cfg_.a;
    return high * detail::max_tail(cfg_.tracking.q) < Real(1) &&
           high * detail::max_tail(cfg_.tracking.q_tilde) < Real(1);
  }

  std::uint64_t draw_period() const {
    if (cfg_.m_jitter == 0) return cfg_.m_base;
    return cfg_.m_base + counter_uniform_int(sched_key_, schedule_draws_, cfg_.m_jitter);
  }

  HilConfigT<Real> cfg_;
  std::array<TrackedQuantileT<Real>, 3> members_{};
  Real center_lambda_{};
  std::uint64_t steps_since_rebalance_ = 0;
  std::uint64_t next_rebalance_at_ = 0;
  std::uint64_t schedule_draws_ = 0;
  std::uint64_t rebalance_count_ = 0;
  std::uint64_t step_count_ = 0;
  std::uint64_t frugal_key_ = 0;
  std::uint64_t sched_key_ = 0;
  bool rebalanced_once_ = false;
};

using HilTracker = HilTrackerT<double>;

// Single tracked quantile at a fixed lambda; the non-adaptive baseline with
// the same step/observe interface as the adaptive controllers.
template <typename Real>
class FixedTrackerT {
 public:
  FixedTrackerT(TrackingConfigT<Real> cfg, Real lambda, Real initial_estimate,
                std::uint64_t seed)
      : cfg_(std::move(cfg)), tq_(make_tracked(cfg_, lambda, initial_estimate)) {
    frugal_key_ = derive_key(seed, 0x666978ULL);
  }

  Real step(Real x) {
    MemberRng rng{frugal_key_, step_count_++, 0, 0};
    tracked_step(tq_, cfg_, x, rng);
    return tq_.main_q_hat;
  }

  Real current_lambda() const { return tq_.lambda; }
  Real current_mse() const { return tq_.tracker.mse_estimate(); }
  Real current_estimate() const { return tq_.main_q_hat; }
  bool warm() const { return tq_.tracker.is_warm(cfg_.smoothing); }
  const TrackedQuantileT<Real>& tracked() const { return tq_; }

 private:
  TrackingConfigT<Real> cfg_;
  TrackedQuantileT<Real> tq_;
  std::uint64_t step_count_ = 0;
  std::uint64_t frugal_key_ = 0;
};

using FixedTracker = FixedTrackerT<double>;

}  // namespace qtrack

#endif  // QTRACK_CONTROLLERS_HPP
