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

#ifndef MOPP_PLANNER_EPISODE_H_
#define MOPP_PLANNER_EPISODE_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "mopp/envs/environment.h"
#include "mopp/planner/constraints.h"
#include "mopp/planner/planner.h"

namespace mopp {

struct EpisodeResult {
  double total_return = 0.0;  // true environment reward
  int steps = 0;
  int violations = 0;
  std::vector<StepDiagnostics> diagnostics;
};

// Closed-loop MPC: resets `env` with DeriveSeed(seed, 0), starts from a zero
// plan and runs PlanStep with seed DeriveSeed(seed, step + 1) until the
// environment reports done. Actions are clipped to the environment bounds
// when `models` carries none.
EpisodeResult RunEpisode(Environment& env, const ModelBundle& models,
                         const PlannerConfig& config,
                         const Constraints& constraints, std::uint64_t seed);

// Header: step,return_mean,return_max,surviving,u_mean,u_max,violation_flag
void WriteDiagnosticsCsv(const std::vector<StepDiagnostics>& diagnostics,
                         std::ostream& out);

}  // namespace mopp

#endif  // MOPP_PLANNER_EPISODE_H_
