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

#ifndef MOPP_CLI_COMMANDS_H_
#define MOPP_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mopp/adm/adm_ensemble.h"
#include "mopp/cli/run_config.h"
#include "mopp/envs/dataset.h"
#include "mopp/planner/episode.h"
#include "mopp/value/q_network.h"

namespace mopp::cli {

struct CommandOptions {
  std::string out_dir = ".";
  bool quiet = false;
};

// `path` when absolute, otherwise `out_dir`/`path`.
std::string ResolvePath(const CommandOptions& options, const std::string& path);

// Data generation and training. Each writes the artifact named in [paths].
Dataset GenerateConfiguredDataset(const RunConfig& config);
void CmdGenData(const RunConfig& config, const CommandOptions& options);
void CmdTrainDynamics(const RunConfig& config, const CommandOptions& options);
void CmdTrainBehavior(const RunConfig& config, const CommandOptions& options);
// Applies [fqe] reward_transform to the dataset rewards before FQE.
void CmdTrainQ(const RunConfig& config, const CommandOptions& options);
Dataset TransformRewards(const Dataset& dataset, const Constraints& transform);

// Trained artifacts needed for planning.
struct LoadedModels {
  adm::AdmEnsemble dynamics;
  adm::AdmEnsemble behavior;
  std::optional<value::QNetwork> q;
  double threshold = 0.0;  // resolved L

  ModelBundle Bundle() const;
};

// Throws PathError naming the missing artifact and the command producing it.
LoadedModels LoadModels(const RunConfig& config, const CommandOptions& options);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  int episode = 0;
  EpisodeResult result;
  bool failed = false;
  std::string error;
};

// Runs episodes * seeds closed-loop episodes on `threads` workers. Episode e
// of seed s uses RunEpisode seed DeriveSeed(s, e). Records are ordered by
// (seed, episode). Failures are recorded, not thrown.
std::vector<EpisodeRecord> EvaluateEpisodes(
    const std::string& env_name, const ModelBundle& models,
    const PlannerConfig& planner, const Constraints& constraints,
    const std::vector<std::uint64_t>& seeds, int episodes, int threads);

// Mean and population std of per-seed mean returns.
struct SeedSummary {
  double mean_return = 0.0;
  double std_return = 0.0;
  double mean_violations = 0.0;
  double std_violations = 0.0;
};
SeedSummary SummarizeBySeed(const std::vector<EpisodeRecord>& records);

// results.csv (seed,episode,return,steps,violations plus an aggregate row and
// a partial column when any episode failed) and summary.csv. Returns the
// process exit code.
int CmdEvaluate(const RunConfig& config, const CommandOptions& options);
// ablation.csv with one row per (axis value, toggle) cell.
int CmdAblate(const RunConfig& config, const CommandOptions& options);

// Command-line front end; returns the exit code.
int RunCli(int argc, char** argv);

}  // namespace mopp::cli

#endif  // MOPP_CLI_COMMANDS_H_
