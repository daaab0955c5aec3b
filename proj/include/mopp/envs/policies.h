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

#ifndef MOPP_ENVS_POLICIES_H_
#define MOPP_ENVS_POLICIES_H_

#include <cstdint>
#include <functional>
#include <string_view>

#include <Eigen/Core>

#include "mopp/envs/dataset.h"
#include "mopp/envs/environment.h"
#include "mopp/envs/point_mass.h"

namespace mopp {

enum class PolicyQuality { kRandom, kMedium, kExpert };

// Throws ConfigError on unknown names ("random", "medium", "expert").
PolicyQuality ParsePolicyQuality(std::string_view name);

// Stateful: each call consumes the policy's own random stream.
using Policy = std::function<Eigen::VectorXd(const Eigen::VectorXd& state)>;

inline constexpr double kScriptedDamping = 2.5;

// random: uniform in the action bounds.
// medium: a = 0.5 (goal - pos) - 2.5 v + N(0, 0.3^2), clipped.
// expert: a = 1.5 (goal - pos) - 2.5 v + N(0, 0.05^2), clipped.
Policy ScriptedPolicy(PolicyQuality quality, const PointMassEnv& env,
                      std::uint64_t seed);

// Rolls `episodes` episodes; episode e starts from Reset(DeriveSeed(seed, e)).
// Throws DataError when episodes < 1.
Dataset GenerateDataset(Environment& env, const Policy& policy, int episodes,
                        std::uint64_t seed);

}  // namespace mopp

#endif  // MOPP_ENVS_POLICIES_H_
