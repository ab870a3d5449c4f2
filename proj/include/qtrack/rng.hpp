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

#ifndef QTRACK_RNG_HPP
#define QTRACK_RNG_HPP

#include <cstdint>

namespace qtrack {

// SplitMix64 step (Vigna). Used as a seed expander and as the mixer behind
// the counter-addressed generator below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent sub-key from a master seed. Distinct tags give
// unrelated streams (stream sampling, indicator draws, schedule jitter, ...).
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  s ^= tag * 0xd1342543de82ef95ULL;
  k ^= splitmix64(s);
  return k;
}

inline double to_unit_interval(std::uint64_t bits) {
  // 53 high bits -> [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform draw addressed by (key, step, slot). Stateless, so ensemble
// members advanced in parallel get identical draws regardless of thread
// count or iteration order.
inline double counter_uniform(std::uint64_t key, std::uint64_t step, std::uint64_t slot) {
  std::uint64_t z = key;
  z += 0x9e3779b97f4a7c15ULL * (step + 1);
  z += 0xbf58476d1ce4e5b9ULL * (slot + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return to_unit_interval(z);
}

// Per-member uniform source for one controller step. `base_slot` partitions
// the slot space between members (two draws per member per step suffice:
// main and auxiliary estimator).
struct MemberRng {
  std::uint64_t key = 0;
  std::uint64_t step = 0;
  std::uint64_t base_slot = 0;
  std::uint64_t drawn = 0;

  double operator()() { return counter_uniform(key, step, base_slot + drawn++); }
};

// Uniform integer in [0, bound] from a counter-addressed draw.
inline std::uint64_t counter_uniform_int(std::uint64_t key, std::uint64_t step,
                                         std::uint64_t bound) {
  const double u = counter_uniform(key, step, 0);
  auto v = static_cast<std::uint64_t>(u * static_cast<double>(bound + 1));
  return v > bound ? bound : v;
}

}  // namespace qtrack

#endif  // QTRACK_RNG_HPP
