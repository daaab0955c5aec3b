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

#ifndef MOPP_ENVS_ENVIRONMENT_H_
#define MOPP_ENVS_ENVIRONMENT_H_

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

namespace mopp {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;
  int max_steps = 1;
  std::string reward_description;
  bool has_constraint = false;
};

struct EnvStep {
  Eigen::VectorXd state;
  double reward = 0.0;
  bool done = false;
  // constraint predicate evaluated on the new state
  bool violation = false;
};

// Single-threaded episodic environment.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Eigen::VectorXd Reset(std::uint64_t seed) = 0;
  // Actions outside the bounds are clipped.
  virtual EnvStep Step(const Eigen::VectorXd& action) = 0;
  virtual std::unique_ptr<Environment> Clone() const = 0;
};

}  // namespace mopp

#endif  // MOPP_ENVS_ENVIRONMENT_H_
