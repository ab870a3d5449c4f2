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

#include "qtrack/streams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qtrack/quantile_functions.hpp"

namespace qtrack {
namespace {

constexpr double kTwoPi = 6.283185307179586;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Phase of the sine at sample n for period tau. Reduces n modulo tau first so
// the argument stays small for long streams.
double sine_at(std::uint64_t n, double tau) {
  const double r = std::fmod(static_cast<double>(n), tau);
  return std::sin(kTwoPi * r / tau);
}

template <typename Spec>
double tau_at_impl(const Spec& spec, std::uint64_t n) {
  const std::uint64_t cycle = 2 * spec.t_switch;
  return (n % cycle) < spec.t_switch ? spec.tau1 : spec.tau2;
}

}  // namespace

void validate(const NormalSineSpec& spec) {
  require(spec.sigma > 0.0, "stream: sigma must be positive");
  require(spec.tau1 > 0.0 && spec.tau2 > 0.0, "stream: periods must be positive");
  require(spec.t_switch >= 1, "stream: t_switch must be >= 1");
}

void validate(const ChiSqSineSpec& spec) {
  require(spec.nu - std::fabs(spec.b) > 0.0,
          "stream: need nu - |b| > 0 so df stays positive");
  require(spec.tau1 > 0.0 && spec.tau2 > 0.0, "stream: periods must be positive");
  require(spec.t_switch >= 1, "stream: t_switch must be >= 1");
}

void validate(const StreamSpec& spec) {
  std::visit([](const auto& s) { validate(s); }, spec);
}

double tau_at(const NormalSineSpec& spec, std::uint64_t n) {
  return tau_at_impl(spec, n);
}

double tau_at(const ChiSqSineSpec& spec, std::uint64_t n) {
  return tau_at_impl(spec, n);
}

double mean_at(const NormalSineSpec& spec, std::uint64_t n) {
  return spec.mu + spec.b * sine_at(n, tau_at(spec, n));
}

double df_at(const ChiSqSineSpec& spec, std::uint64_t n) {
  return spec.nu + spec.b * sine_at(n, tau_at(spec, n));
}

double sample_at(const NormalSineSpec& spec, std::uint64_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(mean_at(spec, n), spec.sigma);
  return dist(gen);
}

double sample_at(const ChiSqSineSpec& spec, std::uint64_t n, std::mt19937_64& gen) {
  // chi-squared(df) is Gamma(shape df/2, scale 2)
  std::gamma_distribution<double> dist(0.5 * df_at(spec, n), 2.0);
  return dist(gen);
}

double true_quantile(const NormalSineSpec& spec, std::uint64_t n, double q) {
  return mean_at(spec, n) + spec.sigma * inv_norm_cdf(q);
}

double true_quantile(const ChiSqSineSpec& spec, std::uint64_t n, double q) {
  return inv_chisq_cdf(q, df_at(spec, n));
}

double true_quantile(const StreamSpec& spec, std::uint64_t n, double q) {
  return std::visit([&](const auto& s) { return true_quantile(s, n, q); }, spec);
}

NormalSineSpec with_fixed_tau(NormalSineSpec spec, double tau) {
  spec.tau1 = tau;
  spec.tau2 = tau;
  return spec;
}

ChiSqSineSpec with_fixed_tau(ChiSqSineSpec spec, double tau) {
  spec.tau1 = tau;
  spec.tau2 = tau;
  return spec;
}

StreamSpec with_fixed_tau(StreamSpec spec, double tau) {
  std::visit([&](auto& s) { s = with_fixed_tau(s, tau); }, spec);
  return spec;
}

SyntheticStream::SyntheticStream(StreamSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), gen_(seed) {
  validate(spec_);
}

double SyntheticStream::next() {
  ++position_;
  return std::visit([&](const auto& s) { return sample_at(s, position_, gen_); },
                    spec_);
}

double SyntheticStream::true_quantile(double q) const {
  return qtrack::true_quantile(spec_, position_, q);
}

RateSeries rates_from_timestamps(std::vector<double> timestamps,
                                 double jitter_resolution, std::uint64_t seed) {
  require(jitter_resolution >= 0.0, "rates: jitter resolution must be >= 0");
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    require(timestamps[i] >= timestamps[i - 1],
            "rates: timestamps must be non-decreasing");

  if (jitter_resolution > 0.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> jitter(0.0, jitter_resolution);
    for (double& t : timestamps) t += jitter(gen);
    // Jitter can reorder timestamps that were within one resolution step of
    // each other; the rate definition needs them sorted.
    std::sort(timestamps.begin(), timestamps.end());
  }

  RateSeries out;
  if (timestamps.size() < 2) return out;
  out.rates.reserve(timestamps.size() - 1);
  out.times.reserve(timestamps.size() - 1);
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    const double gap = timestamps[i] - timestamps[i - 1];
    if (gap == 0.0) {
      ++out.dropped;
      continue;
    }
    out.rates.push_back(1.0 / gap);
    out.times.push_back(timestamps[i]);
  }
  return out;
}

std::vector<double> read_timestamp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open timestamp file: " + path);
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream parse(line);
    double value = 0.0;
    if (!(parse >> value)) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": not a timestamp: " << line;
      throw std::runtime_error(msg.str());
    }
    out.push_back(value);
  }
  return out;
}

void validate(const PoissonTicksSpec& spec) {
  require(spec.day_rate > 0.0 && spec.night_rate > 0.0,
          "poisson: rates must be positive");
  require(spec.day_fraction >= 0.0 && spec.day_fraction <= 1.0,
          "poisson: day fraction must lie in [0, 1]");
  require(spec.period > 0.0, "poisson: period must be positive");
  require(spec.event_factor > 0.0, "poisson: event factor must be positive");
}

double poisson_rate_at(const PoissonTicksSpec& spec, double t) {
  const double phase = std::fmod(t, spec.period);
  double rate =
      phase < spec.day_fraction * spec.period ? spec.day_rate : spec.night_rate;
  if (spec.event_time >= 0.0 && t >= spec.event_time) rate *= spec.event_factor;
  return rate;
}

std::vector<double> generate_poisson_timestamps(const PoissonTicksSpec& spec,
                                                double duration, std::uint64_t seed) {
  validate(spec);
  require(duration > 0.0, "poisson: duration must be positive");
  double rate_max = std::max(spec.day_rate, spec.night_rate);
  if (spec.event_time >= 0.0 && spec.event_time < duration)
    rate_max *= std::max(spec.event_factor, 1.0);

  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> gap(rate_max);
  std::uniform_real_distribution<double> accept(0.0, 1.0);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rate_max * duration * 0.75) + 16);
  double t = 0.0;
  for (;;) {
    t += gap(gen);
    if (t >= duration) break;
    if (accept(gen) * rate_max <= poisson_rate_at(spec, t)) out.push_back(t);
  }
  return out;
}

}  // namespace qtrack
