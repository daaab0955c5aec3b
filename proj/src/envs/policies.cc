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

#include "mopp/envs/policies.h"

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mopp/errors.h"
#include "mopp/rng.h"

namespace mopp {

PolicyQuality ParsePolicyQuality(std::string_view name) {
  if (name == "random") return PolicyQuality::kRandom;
  if (name == "medium") return PolicyQuality::kMedium;
  if (name == "expert") return PolicyQuality::kExpert;
  throw ConfigError("unknown policy quality '" + std::string(name) + "'");
}

Policy ScriptedPolicy(PolicyQuality quality, const PointMassEnv& env,
                      std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  const Eigen::VectorXd low = env.spec().action_low;
  const Eigen::VectorXd high = env.spec().action_high;
  if (quality == PolicyQuality::kRandom) {
    return [rng, low, high](const Eigen::VectorXd&) {
      Eigen::VectorXd a(low.size());
      for (Eigen::Index d = 0; d < a.size(); ++d) {
        a[d] = std::uniform_real_distribution<double>(low[d], high[d])(*rng);
      }
      return a;
    };
  }
  const double gain = quality == PolicyQuality::kMedium ? 0.5 : 1.5;
  const double noise = quality == PolicyQuality::kMedium ? 0.3 : 0.05;
  const Eigen::Vector2d goal = env.options().goal;
  return [rng, low, high, gain, noise, goal](const Eigen::VectorXd& s) {
    Eigen::VectorXd a = gain * (goal - s.head<2>()) - kScriptedDamping * s.tail<2>();
    for (Eigen::Index d = 0; d < a.size(); ++d) a[d] += noise * StandardNormal(*rng);
    return Eigen::VectorXd(a.cwiseMax(low).cwiseMin(high));
  };
}

Dataset GenerateDataset(Environment& env, const Policy& policy, int episodes,
                        std::uint64_t seed) {
  if (episodes < 1) throw DataError("generate_dataset: episodes must be >= 1");
  const EnvSpec& spec = env.spec();
  Dataset dataset(spec.state_dim, spec.action_dim);
  std::vector<float> s(spec.state_dim), a(spec.action_dim), s_next(spec.state_dim);
  for (int e = 0; e < episodes; ++e) {
    Eigen::VectorXd state = env.Reset(DeriveSeed(seed, e));
    for (int t = 0; t < spec.max_steps; ++t) {
      Eigen::VectorXd action = policy(state);
      action = action.cwiseMax(spec.action_low).cwiseMin(spec.action_high);
      EnvStep step = env.Step(action);
      for (int d = 0; d < spec.state_dim; ++d) {
        s[d] = static_cast<float>(state[d]);
        s_next[d] = static_cast<float>(step.state[d]);
      }
      for (int d = 0; d < spec.action_dim; ++d) a[d] = static_cast<float>(action[d]);
      dataset.Append(s, a, static_cast<float>(step.reward), s_next, step.done,
                     static_cast<std::uint32_t>(e));
      state = step.state;
      if (step.done) break;
    }
  }
  return dataset;
}

}  // namespace mopp
