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

#ifndef MOPP_CLI_RUN_CONFIG_H_
#define MOPP_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mopp/adm/adm_train.h"
#include "mopp/envs/point_mass.h"
#include "mopp/io/key_value.h"
#include "mopp/planner/constraints.h"
#include "mopp/planner/planner.h"
#include "mopp/value/fqe.h"

namespace mopp::cli {

// Planner ablation toggles, e.g. "full", "noP" or "noMQ-noP-noV".
struct Toggle {
  std::string name;
  bool use_max_q = true;
  bool use_pruning = true;
  bool use_value = true;
};

// Throws ConfigError on unknown parts.
Toggle ParseToggle(const std::string& name);

struct RunConfig {
  // [run]
  std::uint64_t seed = 0;

  // [env]
  std::string env = "pointmass";  // pointmass | pointmass_constrained

  // [data]
  std::vector<std::string> qualities = {"medium"};
  std::vector<double> mix = {1.0};
  int episodes = 100;  // per quality

  // [adm]
  adm::AdmTrainConfig dynamics;  // ensemble_size = K_1
  adm::AdmTrainConfig behavior;  // ensemble_size = K_2

  // [fqe]
  value::FqeConfig fqe;
  std::string fqe_reward_transform = "none";  // none | jump | penalty

  // [planner]
  PlannerConfig planner;
  bool threshold_auto = true;  // L from the dataset discrepancy percentile
  double threshold_percentile = 85.0;

  // [constraints]
  std::string constraint_mode = "none";  // none | reward_penalty | rollout_penalty | jump
  double alpha_c = 0.5;
  double alpha_r = 0.4;
  double velocity_cap = 1.5;

  // [eval]
  std::vector<std::uint64_t> eval_seeds = {0, 1, 2, 3, 4};
  int eval_episodes = 20;
  int threads = 1;
  bool diagnostics = false;

  // [ablate]
  std::string ablate_axis = "sigma_max";  // sigma_max | horizon | threshold | kappa | beta
  std::vector<double> ablate_values = {0.01, 0.5, 1.0};
  std::vector<std::string> ablate_toggles = {"full", "noMQ", "noP"};

  // [paths], relative entries resolve against the output directory
  std::string dataset_path = "dataset.mds";
  std::string dynamics_dir = "dynamics";
  std::string behavior_dir = "behavior";
  std::string q_dir = "q";

  // Throws ConfigError on inconsistent values.
  void Validate() const;
};

// Unknown sections or keys and malformed values throw ConfigError naming
// the source and line.
RunConfig ParseRunConfig(const io::KeyValueFile& file);
RunConfig LoadRunConfig(const std::string& path);
// Every key with its current value, in a form ParseRunConfig accepts.
io::KeyValueFile ToKeyValue(const RunConfig& config);

// Throws ConfigError on unknown environment names.
std::unique_ptr<PointMassEnv> MakeEnvironment(const std::string& name);
// Rollout constraints selected by [constraints] mode.
Constraints MakeConstraints(const RunConfig& config);
// Transform applied to dataset rewards before FQE; empty for "none".
Constraints MakeFqeRewardTransform(const RunConfig& config);

}  // namespace mopp::cli

#endif  // MOPP_CLI_RUN_CONFIG_H_
