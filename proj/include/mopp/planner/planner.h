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

#ifndef MOPP_PLANNER_PLANNER_H_
#define MOPP_PLANNER_PLANNER_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mopp/adm/adm_ensemble.h"
#include "mopp/envs/dataset.h"
#include "mopp/planner/constraints.h"
#include "mopp/rng.h"
#include "mopp/value/q_network.h"

namespace mopp {

struct PlannerConfig {
  int horizon = 4;                // H
  double kappa = 3.0;             // re-weighting factor
  double beta = 0.0;              // mixture with the previous plan
  double threshold = 1.0;         // L, uncertainty threshold for pruning
  double sigma_max = 0.5;         // sigma_M, std scaling parameter
  int num_rollouts = 100;         // N
  int min_trajectories = 0;       // N_m; 0 selects max(1, floor(0.2 N))
  int candidates = 10;            // m, actions per step for the max-Q step
  int value_samples = 10;         // K_Q
  bool use_max_q = true;
  bool use_pruning = true;
  bool use_value = true;

  // Throws ConfigError on out-of-range fields.
  void Validate() const;
  // Effective N_m.
  int MinTrajectories() const;
};

// Frozen models used by the planner. `q` may be null when neither max-Q nor
// the value bonus is enabled. Empty bounds disable action clipping.
struct ModelBundle {
  const adm::AdmEnsemble* dynamics = nullptr;
  const adm::AdmEnsemble* behavior = nullptr;
  const value::QNetwork* q = nullptr;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;

  int state_dim() const { return behavior->input_dim(); }
  int action_dim() const { return behavior->output_dim(); }
  // Throws ConfigError or ShapeError when the models are inconsistent with
  // each other or with `config`.
  void Validate(const PlannerConfig& config) const;
};

// A*_t for t = 0..H-1, one row per step.
using ActionPlan = Eigen::MatrixXd;

ActionPlan ZeroPlan(const PlannerConfig& config, int action_dim);

// N rollouts of length H.
struct RolloutSet {
  std::vector<Eigen::MatrixXd> states;   // H x |S| per rollout, s_0..s_{H-1}
  std::vector<Eigen::MatrixXd> actions;  // H x |A| per rollout
  Eigen::VectorXd returns;               // R_n
  Eigen::MatrixXd uncertainty;           // U, N x H
  std::vector<bool> aborted;             // non-finite model state reached

  int size() const { return static_cast<int>(actions.size()); }
};

// sigma' = (sigma_M / max sigma) * sigma; every entry becomes sigma_M when
// max sigma < 1e-6. Throws ConfigError when sigma_M <= 0.
Eigen::VectorXd ScaleStd(const Eigen::VectorXd& sigma, double sigma_max);

// Samples m candidates from N(mu, diag(ScaleStd(sigma))^2) of one behavior
// member (m = 1 without max-Q), clips them to the bounds and returns the
// first Q-argmax.
Eigen::VectorXd GuidedAction(const Eigen::VectorXd& state,
                             const adm::AdmModel& behavior,
                             const ModelBundle& models,
                             const PlannerConfig& config, Rng& rng);

// Guided actions for every row of `states`; row n uses `member[n]` and
// draws from *rngs[n] only.
Eigen::MatrixXd GuidedActionBatch(const Eigen::MatrixXd& states,
                                  std::span<const int> member,
                                  const ModelBundle& models,
                                  const PlannerConfig& config,
                                  std::span<Rng* const> rngs);

// Runs config.num_rollouts guided rollouts from `state`. Rollout n draws
// from Rng(DeriveSeed(seed, n)), so the result does not depend on how the
// rollouts are batched.
RolloutSet Rollout(const Eigen::VectorXd& state, const ModelBundle& models,
                   const ActionPlan& plan, const PlannerConfig& config,
                   const Constraints& constraints, std::uint64_t seed);

// Indices of the trajectories kept by pruning, ascending: all rows of U
// strictly below L, backfilled with the lowest cumulative uncertainty rows
// (ties by index) up to N_m. Throws ConfigError unless 1 <= N_m <= N.
std::vector<int> TrajPrune(const Eigen::MatrixXd& uncertainty,
                           double threshold, int min_trajectories);

// Softmax(kappa * R) weighted average of the action sequences. Throws
// std::logic_error on an empty set and ShapeError on ragged input.
ActionPlan MppiUpdate(std::span<const Eigen::MatrixXd> actions,
                      std::span<const double> returns, double kappa);

struct StepDiagnostics {
  int step = 0;
  double return_mean = 0.0;
  double return_max = 0.0;
  int surviving = 0;  // trajectories with every U entry below L
  double u_mean = 0.0;  // over finite entries
  double u_max = 0.0;
  bool violation = false;
};

struct PlanStepResult {
  Eigen::VectorXd action;  // A*_0
  StepDiagnostics diagnostics;
};

// One MPC step: rollouts, optional pruning and the MPPI update. Replaces
// `plan` with the new A*.
PlanStepResult PlanStep(const Eigen::VectorXd& state, const ModelBundle& models,
                        const PlannerConfig& config,
                        const Constraints& constraints, ActionPlan& plan,
                        std::uint64_t seed);

// Given percentile (in [0, 100]) of the dynamics discrepancy over the
// dataset's (s, a) pairs; a data-driven choice of L.
double UncertaintyPercentile(const adm::AdmEnsemble& dynamics,
                             const Dataset& dataset, double percentile);

}  // namespace mopp

#endif  // MOPP_PLANNER_PLANNER_H_
