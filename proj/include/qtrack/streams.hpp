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

#ifndef QTRACK_STREAMS_HPP
#define QTRACK_STREAMS_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace qtrack {

// Normally distributed samples whose mean swings sinusoidally. The sine
// period alternates between tau1 and tau2 every t_switch samples, so the
// stream cycles through fast-drift and slow-drift regimes.
struct NormalSineSpec {
  double mu = 8.0;
  double b = 2.0;
  double sigma = 1.0;
  double tau1 = 500.0;
  double tau2 = 10000.0;
  std::uint64_t t_switch = 10000;
};

// Chi-squared samples whose degrees of freedom swing sinusoidally, same
// regime alternation as NormalSineSpec. Requires nu - b > 0 so the df stays
// positive at the bottom of the swing.
struct ChiSqSineSpec {
  double nu = 6.0;
  double b = 2.0;
  double tau1 = 500.0;
  double tau2 = 10000.0;
  std::uint64_t t_switch = 10000;
};

using StreamSpec = std::variant<NormalSineSpec, ChiSqSineSpec>;

void validate(const NormalSineSpec& spec);
void validate(const ChiSqSineSpec& spec);
void validate(const StreamSpec& spec);

// Sine period in effect at sample n (n counts from 1).
double tau_at(const NormalSineSpec& spec, std::uint64_t n);
double tau_at(const ChiSqSineSpec& spec, std::uint64_t n);

// Distribution parameter at sample n: the mean for the normal stream, the
// degrees of freedom for the chi-squared stream.
double mean_at(const NormalSineSpec& spec, std::uint64_t n);
double df_at(const ChiSqSineSpec& spec, std::uint64_t n);

// One sample from the distribution at position n.
double sample_at(const NormalSineSpec& spec, std::uint64_t n, std::mt19937_64& gen);
double sample_at(const ChiSqSineSpec& spec, std::uint64_t n, std::mt19937_64& gen);

// Exact q-quantile of the distribution at position n.
double true_quantile(const NormalSineSpec& spec, std::uint64_t n, double q);
double true_quantile(const ChiSqSineSpec& spec, std::uint64_t n, double q);
double true_quantile(const StreamSpec& spec, std::uint64_t n, double q);

// Returns a copy with both regimes pinned to the same period, for
// single-regime experiments.
NormalSineSpec with_fixed_tau(NormalSineSpec spec, double tau);
ChiSqSineSpec with_fixed_tau(ChiSqSineSpec spec, double tau);
StreamSpec with_fixed_tau(StreamSpec spec, double tau);

// Sequential sampler over a StreamSpec. Sample positions count from 1.
class SyntheticStream {
 public:
  SyntheticStream(StreamSpec spec, std::uint64_t seed);

  // Draws the sample at the next position.
  double next();
  // Position of the most recent sample; 0 before the first next().
  std::uint64_t position() const { return position_; }
  // Exact q-quantile at the most recent position.
  double true_quantile(double q) const;
  const StreamSpec& spec() const { return spec_; }

 private:
  StreamSpec spec_;
  std::mt19937_64 gen_;
  std::uint64_t position_ = 0;
};

// Event rates from a sorted timestamp sequence: R_t = 1 / (T_t - T_{t-1}).
// Timestamps recorded at coarse resolution arrive tied, which would produce
// infinite rates, so each timestamp gets U(0, jitter_resolution) added before
// the gaps are taken (jitter_resolution = 0 disables this). Any gap that is
// still exactly zero after jittering is dropped and counted.
struct RateSeries {
  std::vector<double> rates;  // one per surviving gap
  std::vector<double> times;  // right endpoint of each gap, post-jitter
  std::size_t dropped = 0;    // gaps dropped for being exactly zero
};

RateSeries rates_from_timestamps(std::vector<double> timestamps,
                                 double jitter_resolution, std::uint64_t seed);

// Reads one timestamp per line; blank lines and lines starting with '#' are
// skipped. Throws std::runtime_error on unreadable files or unparsable lines.
std::vector<double> read_timestamp_file(const std::string& path);

// Inhomogeneous Poisson arrivals with a square day/night intensity profile
// and an optional permanent rate step at event_time.
struct PoissonTicksSpec {
  double day_rate = 4.0;      // events per second during the day phase
  double night_rate = 1.0;    // events per second during the night phase
  double day_fraction = 0.5;  // leading fraction of each period that is day
  double period = 86400.0;    // seconds
  double event_time = -1.0;   // < 0 disables the event
  double event_factor = 1.0;  // rate multiplier from event_time onward
};

void validate(const PoissonTicksSpec& spec);

// Intensity at absolute time t.
double poisson_rate_at(const PoissonTicksSpec& spec, double t);

// Arrival times on [0, duration) via thinning.
std::vector<double> generate_poisson_timestamps(const PoissonTicksSpec& spec,
                                                double duration, std::uint64_t seed);

}  // namespace qtrack

#endif  // QTRACK_STREAMS_HPP
