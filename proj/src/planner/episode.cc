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

#include "mopp/planner/episode.h"

#include "mopp/errors.h"
#include "mopp/io/key_value.h"
#include "mopp/rng.h"

namespace mopp {

EpisodeResult RunEpisode(Environment& env, const ModelBundle& models,
                         const PlannerConfig& config,
                         const Constraints& constraints, std::uint64_t seed) {
  const EnvSpec& spec = env.spec();
  ModelBundle bundle = models;
  if (bundle.action_low.size() == 0) {
    bundle.action_low = spec.action_low;
    bundle.action_high = spec.action_high;
  }
  config.Validate();
  bundle.Validate(config);
  if (bundle.state_dim() != spec.state_dim ||
      bundle.action_dim() != spec.action_dim) {
    throw ShapeError("models do not match the environment dimensions");
  }

  EpisodeResult result;
  Eigen::VectorXd state = env.Reset(DeriveSeed(seed, 0));
  ActionPlan plan = ZeroPlan(config, spec.action_dim);
  for (int step = 0; step < spec.max_steps; ++step) {
    PlanStepResult planned = PlanStep(state, bundle, config, constraints, plan,
                                      DeriveSeed(seed, step + 1));
    EnvStep outcome = env.Step(planned.action);
    planned.diagnostics.step = step;
    planned.diagnostics.violation = outcome.violation;
    result.diagnostics.push_back(planned.diagnostics);
    result.total_return += outcome.reward;
    result.violations += outcome.violation ? 1 : 0;
    ++result.steps;
    state = std::move(outcome.state);
    if (outcome.done) break;
  }
  return result;
}

void WriteDiagnosticsCsv(const std::vector<StepDiagnostics>& diagnostics,
                         std::ostream& out) {
  out << "step,return_mean,return_max,surviving,u_mean,u_max,violation_flag\n";
  for (const StepDiagnostics& d : diagnostics) {
    out << d.step << ',' << io::FormatDouble(d.return_mean) << ','
        << io::FormatDouble(d.return_max) << ',' << d.surviving << ','
        << io::FormatDouble(d.u_mean) << ',' << io::FormatDouble(d.u_max) << ','
        << (d.violation ? 1 : 0) << '\n';
  }
}

}  // namespace mopp
