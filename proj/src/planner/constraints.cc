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

#include "mopp/planner/constraints.h"

#include <algorithm>

#include "mopp/errors.h"

namespace mopp {
namespace {

void CheckAlpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("constraint weight alpha must lie in [0, 1]");
  }
}

}  // namespace

Constraints VelocityRewardPenalty(double velocity_cap, double alpha) {
  CheckAlpha(alpha);
  Constraints c;
  c.reward_transform = [velocity_cap, alpha](const Eigen::VectorXd& s,
                                             const Eigen::VectorXd&, double r) {
    if (s.size() < 3) throw ShapeError("velocity penalty needs v_x at index 2");
    return alpha * r +
           (1.0 - alpha) * kConstraintWeight * std::min(velocity_cap - s[2], 0.0);
  };
  return c;
}

Constraints VelocityRolloutPenalty(double velocity_cap) {
  Constraints c;
  c.rollout_penalty = [velocity_cap](const Eigen::VectorXd& s,
                                     const Eigen::VectorXd&) {
    if (s.size() < 3) throw ShapeError("velocity penalty needs v_x at index 2");
    return kConstraintWeight * std::max(s[2] - velocity_cap, 0.0);
  };
  return c;
}

Constraints JumpRewardTransform(double alpha) {
  CheckAlpha(alpha);
  Constraints c;
  c.reward_transform = [alpha](const Eigen::VectorXd& s, const Eigen::VectorXd&,
                               double r) {
    if (s.size() < 2) throw ShapeError("jump transform needs y at index 1");
    return alpha * r + (1.0 - alpha) * kConstraintWeight * s[1];
  };
  return c;
}

}  // namespace mopp
