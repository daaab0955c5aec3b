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

#ifndef MOPP_ENVS_POINT_MASS_H_
#define MOPP_ENVS_POINT_MASS_H_

#include <cstdint>
#include <memory>
#include <optional>

#include <Eigen/Core>

#include "mopp/envs/environment.h"

namespace mopp {

struct PointMassOptions {
  Eigen::Vector2d goal{1.0, 1.0};
  double dt = 0.05;
  double max_speed = 3.0;
  double action_cost = 0.01;
  int max_steps = 200;
  double start_noise = 0.01;
  // violation when v_x exceeds this value
  std::optional<double> velocity_cap;
};

// 2-D double integrator. State (x, y, v_x, v_y), action (a_x, a_y) in
// [-1, 1]^2. One step: pos += dt * v; v = clamp(v + dt * a, +-max_speed);
// reward = -|pos' - goal| - action_cost * |a|^2 on the post-step position.
class PointMassEnv : public Environment {
 public:
  explicit PointMassEnv(PointMassOptions options, std::string name = "pointmass");

  const EnvSpec& spec() const override { return spec_; }
  Eigen::VectorXd Reset(std::uint64_t seed) override;
  EnvStep Step(const Eigen::VectorXd& action) override;
  std::unique_ptr<Environment> Clone() const override;

  const PointMassOptions& options() const { return options_; }
  const Eigen::VectorXd& state() const { return state_; }
  // Starts from an explicit state without noise.
  void SetState(const Eigen::VectorXd& state);

  double Reward(const Eigen::VectorXd& next_state,
                const Eigen::VectorXd& action) const;
  bool Violates(const Eigen::VectorXd& state) const;

 private:
  PointMassOptions options_;
  EnvSpec spec_;
  Eigen::VectorXd state_;
  int steps_ = 0;
};

// Goal (1, 1).
std::unique_ptr<PointMassEnv> MakePointMassEnv();
// Goal (5, 1) with a v_x > 1.5 violation predicate; the distant goal makes
// fast policies exceed the cap.
std::unique_ptr<PointMassEnv> MakePointMassConstrainedEnv();

}  // namespace mopp

#endif  // MOPP_ENVS_POINT_MASS_H_
