// Copyright 2026 The MOPP Authors
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

#ifndef MOPP_RNG_H_
#define MOPP_RNG_H_

#include <cstdint>
#include <random>

namespace mopp {

using Rng = std::mt19937_64;

// splitmix64 finalizer over (base, index); used to derive independent
// streams, e.g. one per rollout or per episode.
inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double StandardNormal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline int UniformIndex(Rng& rng, int count) {
  return std::uniform_int_distribution<int>(0, count - 1)(rng);
}

}  // namespace mopp

#endif  // MOPP_RNG_H_
