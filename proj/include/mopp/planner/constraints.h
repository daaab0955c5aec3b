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

#ifndef MOPP_PLANNER_CONSTRAINTS_H_
#define MOPP_PLANNER_CONSTRAINTS_H_

#include <functional>

#include <Eigen/Core>

namespace mopp {

// Optional hooks applied inside model rollouts. `state` is the state reached
// by taking `action`, matching where the environment evaluates reward and
// violations.
struct Constraints {
  // r' = f(s, a, r); replaces the ensemble-mean model reward.
  std::function<double(const Eigen::VectorXd& state,
                       const Eigen::VectorXd& action, double reward)>
      reward_transform;
  // p(s, a) >= 0, added to the uncertainty of the step.
  std::function<double(const Eigen::VectorXd& state,
                       const Eigen::VectorXd& action)>
      rollout_penalty;

  bool empty() const { return !reward_transform && !rollout_penalty; }
};

inline constexpr double kConstraintWeight = 100.0;

// r' = alpha * r + (1 - alpha) * 100 * min(cap - v_x, 0), v_x = state[2].
Constraints VelocityRewardPenalty(double velocity_cap, double alpha = 0.5);
// p(s, a) = 100 * max(v_x - cap, 0).
Constraints VelocityRolloutPenalty(double velocity_cap);
// r' = alpha * r + (1 - alpha) * 100 * y, y = state[1]; rewards height.
Constraints JumpRewardTransform(double alpha = 0.4);

}  // namespace mopp

#endif  // MOPP_PLANNER_CONSTRAINTS_H_
