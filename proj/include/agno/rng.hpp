// Copyright 2026 The AGNO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based noise: every draw is a pure function of (seed, tick, channel),
// so logs do not depend on call order or on the standard library's
// distribution implementations.

#pragma once

#include <cmath>
#include <cstdint>

#include "agno/types.hpp"

namespace agno::rng {

inline constexpr std::uint64_t kDefaultSeed = 42;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t tick,
                                    std::uint64_t stream) {
  return mix64(mix64(mix64(seed) ^ tick) ^ (stream * 0xd1b54a32d192ed03ULL));
}

// Uniform on the open interval (0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t tick, std::uint64_t stream) {
  return (static_cast<double>(hash(seed, tick, stream) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two independent streams.
inline double normal(std::uint64_t seed, std::uint64_t tick, std::uint64_t channel) {
  const double u1 = uniform(seed, tick, 2 * channel);
  const double u2 = uniform(seed, tick, 2 * channel + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

template <int N>
Eigen::Matrix<double, N, 1> normal_vector(std::uint64_t seed, std::uint64_t tick,
                                          std::uint64_t first_channel = 0) {
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = normal(seed, tick, first_channel + i);
  return v;
}

}  // namespace agno::rng
