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

#include "mopp/envs/point_mass.h"

#include <utility>

#include "mopp/errors.h"
#include "mopp/rng.h"

namespace mopp {

PointMassEnv::PointMassEnv(PointMassOptions options, std::string name)
    : options_(std::move(options)), state_(Eigen::VectorXd::Zero(4)) {
  if (options_.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  spec_.name = std::move(name);
  spec_.state_dim = 4;
  spec_.action_dim = 2;
  spec_.action_low = Eigen::VectorXd::Constant(2, -1.0);
  spec_.action_high = Eigen::VectorXd::Constant(2, 1.0);
  spec_.max_steps = options_.max_steps;
  spec_.reward_description = "-|pos - goal| - 0.01 |a|^2";
  spec_.has_constraint = options_.velocity_cap.has_value();
}

Eigen::VectorXd PointMassEnv::Reset(std::uint64_t seed) {
  Rng rng(seed);
  state_ = Eigen::VectorXd::Zero(4);
  state_[0] = options_.start_noise * StandardNormal(rng);
  state_[1] = options_.start_noise * StandardNormal(rng);
  steps_ = 0;
  return state_;
}

void PointMassEnv::SetState(const Eigen::VectorXd& state) {
  if (state.size() != 4) throw ShapeError("point mass state has 4 entries");
  state_ = state;
  steps_ = 0;
}

double PointMassEnv::Reward(const Eigen::VectorXd& next_state,
                            const Eigen::VectorXd& action) const {
  Eigen::Vector2d offset = next_state.head<2>() - options_.goal;
  return -offset.norm() - options_.action_cost * action.squaredNorm();
}

bool PointMassEnv::Violates(const Eigen::VectorXd& state) const {
  return options_.velocity_cap.has_value() && state[2] > *options_.velocity_cap;
}

EnvStep PointMassEnv::Step(const Eigen::VectorXd& action) {
  if (action.size() != 2) throw ShapeError("point mass action has 2 entries");
  Eigen::VectorXd a = action.cwiseMax(spec_.action_low).cwiseMin(spec_.action_high);
  Eigen::VectorXd next(4);
  next.head<2>() = state_.head<2>() + options_.dt * state_.tail<2>();
  next.tail<2>() = (state_.tail<2>() + options_.dt * a)
                       .cwiseMax(-options_.max_speed)
                       .cwiseMin(options_.max_speed);
  state_ = next;
  ++steps_;
  EnvStep step;
  step.state = next;
  step.reward = Reward(next, a);
  step.done = steps_ >= options_.max_steps;
  step.violation = Violates(next);
  return step;
}

std::unique_ptr<Environment> PointMassEnv::Clone() const {
  return std::make_unique<PointMassEnv>(*this);
}

std::unique_ptr<PointMassEnv> MakePointMassEnv() {
  return std::make_unique<PointMassEnv>(PointMassOptions{}, "pointmass");
}

std::unique_ptr<PointMassEnv> MakePointMassConstrainedEnv() {
  PointMassOptions options;
  options.goal = Eigen::Vector2d(5.0, 1.0);
  options.velocity_cap = 1.5;
  return std::make_unique<PointMassEnv>(options, "pointmass_constrained");
}

}  // namespace mopp
