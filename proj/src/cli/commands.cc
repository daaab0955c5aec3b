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

#include "mopp/cli/commands.h"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mopp/adm/adm_train.h"
#include "mopp/adm/ensemble_io.h"
#include "mopp/envs/dataset_io.h"
#include "mopp/envs/policies.h"
#include "mopp/errors.h"
#include "mopp/io/key_value.h"
#include "mopp/rng.h"
#include "mopp/value/fqe.h"

namespace mopp::cli {
namespace {

namespace fs = std::filesystem;

// Seed stream indices under [run] seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kDynamicsStream = 2;
constexpr std::uint64_t kBehaviorStream = 3;
constexpr std::uint64_t kQStream = 4;

void Log(const CommandOptions& options, const std::string& message) {
  if (!options.quiet) std::cerr << "[mopp] " << message << '\n';
}

void RequirePath(const std::string& path, const std::string& what,
                 const std::string& producer) {
  if (!fs::exists(path)) {
    throw PathError(what + " not found at '" + path + "'; run `mopp " +
                    producer + "` with the same --out and config first");
  }
}

void WriteText(const std::string& path, const std::string& text) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PathError("cannot write '" + path + "'");
  out << text;
  if (!out) throw PathError("failed writing '" + path + "'");
}

Dataset LoadConfiguredDataset(const RunConfig& config,
                              const CommandOptions& options) {
  const std::string path = ResolvePath(options, config.dataset_path);
  RequirePath(path, "dataset", "gen-data");
  return LoadDataset(path);
}

void TrainEnsemble(const RunConfig& config, const CommandOptions& options,
                   adm::AdmRole role) {
  const Dataset dataset = LoadConfiguredDataset(config, options);
  const bool dynamics = role == adm::AdmRole::kDynamics;
  adm::AdmTrainConfig train = dynamics ? config.dynamics : config.behavior;
  train.seed = DeriveSeed(config.seed, dynamics ? kDynamicsStream : kBehaviorStream);
  Log(options, "training " + std::string(adm::RoleName(role)) + " ensemble (" +
                   std::to_string(train.ensemble_size) + " members, " +
                   std::to_string(train.steps) + " steps)");
  adm::AdmTrainReport report;
  const adm::AdmEnsemble ensemble = adm::TrainAdm(dataset, role, train, &report);
  for (std::size_t k = 0; k < report.final_loss.size(); ++k) {
    Log(options, "member " + std::to_string(k) + " loss " +
                     io::FormatDouble(report.initial_loss[k]) + " -> " +
                     io::FormatDouble(report.final_loss[k]));
  }
  const std::string dir =
      ResolvePath(options, dynamics ? config.dynamics_dir : config.behavior_dir);
  adm::SaveEnsemble(ensemble, dir);
  Log(options, "wrote " + dir);
}

double Mean(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return v.empty() ? 0.0 : total / v.size();
}

double PopulationStd(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = Mean(v);
  double total = 0.0;
  for (double x : v) total += (x - mean) * (x - mean);
  return std::sqrt(total / v.size());
}

std::string ResultsCsv(const std::vector<EpisodeRecord>& records) {
  bool partial = false;
  for (const EpisodeRecord& r : records) partial = partial || r.failed;
  std::ostringstream out;
  out << "seed,episode,return,steps,violations" << (partial ? ",partial" : "")
      << '\n';
  std::vector<double> returns, steps, violations;
  for (const EpisodeRecord& r : records) {
    out << r.seed << ',' << r.episode << ',';
    if (r.failed) {
      out << "nan,0,0";
    } else {
      out << io::FormatDouble(r.result.total_return) << ',' << r.result.steps << ','
          << r.result.violations;
      returns.push_back(r.result.total_return);
      steps.push_back(r.result.steps);
      violations.push_back(r.result.violations);
    }
    if (partial) out << ',' << (r.failed ? 1 : 0);
    out << '\n';
  }
  const SeedSummary summary = SummarizeBySeed(records);
  out << "aggregate," << returns.size() << ',' << io::FormatDouble(summary.mean_return)
      << ',' << io::FormatDouble(Mean(steps)) << ','
      << io::FormatDouble(summary.mean_violations);
  if (partial) out << ",1";
  out << '\n';
  return out.str();
}

std::string SummaryCsv(const std::vector<EpisodeRecord>& records) {
  std::ostringstream out;
  out << "seed,episodes,failed,mean_return,std_return,mean_violations,std_violations\n";
  std::vector<std::uint64_t> seeds;
  for (const EpisodeRecord& r : records) {
    if (seeds.empty() || seeds.back() != r.seed) seeds.push_back(r.seed);
  }
  for (std::uint64_t seed : seeds) {
    std::vector<double> returns, violations;
    int failed = 0;
    for (const EpisodeRecord& r : records) {
      if (r.seed != seed) continue;
      if (r.failed) {
        ++failed;
        continue;
      }
      returns.push_back(r.result.total_return);
      violations.push_back(r.result.violations);
    }
    out << seed << ',' << returns.size() << ',' << failed << ','
        << io::FormatDouble(Mean(returns)) << ','
        << io::FormatDouble(PopulationStd(returns)) << ','
        << io::FormatDouble(Mean(violations)) << ','
        << io::FormatDouble(PopulationStd(violations)) << '\n';
  }
  const SeedSummary s = SummarizeBySeed(records);
  int failed = 0;
  for (const EpisodeRecord& r : records) failed += r.failed ? 1 : 0;
  out << "aggregate," << records.size() - failed << ',' << failed << ','
      << io::FormatDouble(s.mean_return) << ',' << io::FormatDouble(s.std_return)
      << ',' << io::FormatDouble(s.mean_violations) << ','
      << io::FormatDouble(s.std_violations) << '\n';
  return out.str();
}

}  // namespace

std::string ResolvePath(const CommandOptions& options, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return p.string();
  return (fs::path(options.out_dir) / p).string();
}

Dataset GenerateConfiguredDataset(const RunConfig& config) {
  std::vector<Dataset> parts;
  const std::uint64_t base = DeriveSeed(config.seed, kDataStream);
  for (std::size_t k = 0; k < config.qualities.size(); ++k) {
    std::unique_ptr<PointMassEnv> env = MakeEnvironment(config.env);
    const Policy policy = ScriptedPolicy(ParsePolicyQuality(config.qualities[k]),
                                         *env, DeriveSeed(base, 2 * k));
    parts.push_back(
        GenerateDataset(*env, policy, config.episodes, DeriveSeed(base, 2 * k + 1)));
  }
  if (parts.size() == 1) return std::move(parts.front());
  return Mix(parts, config.mix);
}

void CmdGenData(const RunConfig& config, const CommandOptions& options) {
  const Dataset dataset = GenerateConfiguredDataset(config);
  const std::string path = ResolvePath(options, config.dataset_path);
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  SaveDataset(dataset, path);
  const DatasetStats stats = dataset.ComputeStats();
  Log(options, "wrote " + std::to_string(dataset.size()) + " transitions in " +
                   std::to_string(dataset.num_episodes()) + " episodes to " + path +
                   " (mean episode return " +
                   io::FormatDouble(Mean(stats.episode_returns)) + ")");
}

void CmdTrainDynamics(const RunConfig& config, const CommandOptions& options) {
  TrainEnsemble(config, options, adm::AdmRole::kDynamics);
}

void CmdTrainBehavior(const RunConfig& config, const CommandOptions& options) {
  TrainEnsemble(config, options, adm::AdmRole::kBehavior);
}

Dataset TransformRewards(const Dataset& dataset, const Constraints& transform) {
  if (!transform.reward_transform) return dataset;
  Dataset out(dataset.state_dim(), dataset.action_dim());
  for (int i = 0; i < dataset.size(); ++i) {
    const auto s = dataset.state(i);
    const auto a = dataset.action(i);
    const auto next = dataset.next_state(i);
    const Eigen::VectorXd s_vec =
        Eigen::Map<const Eigen::VectorXf>(next.data(), next.size()).cast<double>();
    const Eigen::VectorXd a_vec =
        Eigen::Map<const Eigen::VectorXf>(a.data(), a.size()).cast<double>();
    const double r = transform.reward_transform(s_vec, a_vec, dataset.reward(i));
    out.Append(s, a, static_cast<float>(r), dataset.next_state(i), dataset.done(i),
               dataset.episode(i));
  }
  return out;
}

void CmdTrainQ(const RunConfig& config, const CommandOptions& options) {
  const Dataset dataset = TransformRewards(LoadConfiguredDataset(config, options),
                                           MakeFqeRewardTransform(config));
  value::FqeConfig fqe = config.fqe;
  fqe.seed = DeriveSeed(config.seed, kQStream);
  Log(options, "fitted Q evaluation (" + std::to_string(fqe.iterations) + " x " +
                   std::to_string(fqe.steps_per_iteration) + " steps, reward " +
                   config.fqe_reward_transform + ")");
  value::FqeReport report;
  const value::QNetwork q = value::FqeTrain(dataset, fqe, &report);
  if (!report.max_change.empty()) {
    Log(options, "final max |Q^k - Q^(k-1)| = " +
                     io::FormatDouble(report.max_change.back()));
  }
  const std::string dir = ResolvePath(options, config.q_dir);
  value::SaveQNetwork(q, dir);
  Log(options, "wrote " + dir);
}

ModelBundle LoadedModels::Bundle() const {
  ModelBundle bundle;
  bundle.dynamics = &dynamics;
  bundle.behavior = &behavior;
  bundle.q = q ? &*q : nullptr;
  return bundle;
}

LoadedModels LoadModels(const RunConfig& config, const CommandOptions& options) {
  const std::string dyn = ResolvePath(options, config.dynamics_dir);
  const std::string beh = ResolvePath(options, config.behavior_dir);
  RequirePath(dyn, "dynamics ensemble", "train-dynamics");
  RequirePath(beh, "behavior ensemble", "train-behavior");
  LoadedModels models{adm::LoadEnsemble(dyn), adm::LoadEnsemble(beh), std::nullopt,
                      config.planner.threshold};
  const std::string q_dir = ResolvePath(options, config.q_dir);
  if (fs::exists(q_dir)) {
    models.q = value::LoadQNetwork(q_dir);
  } else if (config.planner.use_max_q || config.planner.use_value) {
    RequirePath(q_dir, "Q network", "train-q");
  }
  if (config.threshold_auto) {
    models.threshold = UncertaintyPercentile(
        models.dynamics, LoadConfiguredDataset(config, options),
        config.threshold_percentile);
  }
  return models;
}

std::vector<EpisodeRecord> EvaluateEpisodes(
    const std::string& env_name, const ModelBundle& models,
    const PlannerConfig& planner, const Constraints& constraints,
    const std::vector<std::uint64_t>& seeds, int episodes, int threads) {
  std::vector<EpisodeRecord> records;
  for (std::uint64_t seed : seeds) {
    for (int e = 0; e < episodes; ++e) {
      EpisodeRecord record;
      record.seed = seed;
      record.episode = e;
      records.push_back(std::move(record));
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::unique_ptr<PointMassEnv> env = MakeEnvironment(env_name);
    for (std::size_t i = next++; i < records.size(); i = next++) {
      EpisodeRecord& record = records[i];
      try {
        record.result = RunEpisode(*env, models, planner, constraints,
                                   DeriveSeed(record.seed, record.episode));
      } catch (const std::exception& e) {
        record.failed = true;
        record.error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, records.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return records;
}

SeedSummary SummarizeBySeed(const std::vector<EpisodeRecord>& records) {
  std::vector<std::uint64_t> seeds;
  for (const EpisodeRecord& r : records) {
    if (seeds.empty() || seeds.back() != r.seed) seeds.push_back(r.seed);
  }
  std::vector<double> seed_returns, seed_violations;
  for (std::uint64_t seed : seeds) {
    std::vector<double> returns, violations;
    for (const EpisodeRecord& r : records) {
      if (r.seed != seed || r.failed) continue;
      returns.push_back(r.result.total_return);
      violations.push_back(r.result.violations);
    }
    if (returns.empty()) continue;
    seed_returns.push_back(Mean(returns));
    seed_violations.push_back(Mean(violations));
  }
  SeedSummary s;
  s.mean_return = Mean(seed_returns);
  s.std_return = PopulationStd(seed_returns);
  s.mean_violations = Mean(seed_violations);
  s.std_violations = PopulationStd(seed_violations);
  return s;
}

int CmdEvaluate(const RunConfig& config, const CommandOptions& options) {
  const LoadedModels models = LoadModels(config, options);
  PlannerConfig planner = config.planner;
  planner.threshold = models.threshold;
  Log(options, "evaluating " + std::to_string(config.eval_seeds.size()) +
                   " seeds x " + std::to_string(config.eval_episodes) +
                   " episodes on " + config.env + " (L = " +
                   io::FormatDouble(planner.threshold) + ")");
  const std::vector<EpisodeRecord> records =
      EvaluateEpisodes(config.env, models.Bundle(), planner, MakeConstraints(config),
                       config.eval_seeds, config.eval_episodes, config.threads);
  WriteText(ResolvePath(options, "results.csv"), ResultsCsv(records));
  WriteText(ResolvePath(options, "summary.csv"), SummaryCsv(records));
  int failures = 0;
  for (const EpisodeRecord& r : records) {
    if (r.failed) {
      ++failures;
      std::cerr << "[mopp] seed " << r.seed << " episode " << r.episode
                << " failed: " << r.error << '\n';
    } else if (config.diagnostics) {
      std::ostringstream csv;
      WriteDiagnosticsCsv(r.result.diagnostics, csv);
      WriteText(ResolvePath(options, "diagnostics/seed" + std::to_string(r.seed) +
                                         "_episode" + std::to_string(r.episode) +
                                         ".csv"),
                csv.str());
    }
  }
  const SeedSummary s = SummarizeBySeed(records);
  Log(options, "return " + io::FormatDouble(s.mean_return) + " +- " +
                   io::FormatDouble(s.std_return) + ", violations " +
                   io::FormatDouble(s.mean_violations));
  return failures == 0 ? 0 : 1;
}

int CmdAblate(const RunConfig& config, const CommandOptions& options) {
  const LoadedModels models = LoadModels(config, options);
  const Constraints constraints = MakeConstraints(config);
  std::ostringstream out;
  out << "axis,value,toggle,mean_return,std_return,mean_violations,episodes,failed\n";
  int failures = 0;
  for (double value : config.ablate_values) {
    for (const std::string& name : config.ablate_toggles) {
      const Toggle toggle = ParseToggle(name);
      PlannerConfig planner = config.planner;
      planner.threshold = models.threshold;
      planner.use_max_q = toggle.use_max_q;
      planner.use_pruning = toggle.use_pruning;
      planner.use_value = toggle.use_value;
      if (config.ablate_axis == "sigma_max") {
        planner.sigma_max = value;
      } else if (config.ablate_axis == "horizon") {
        planner.horizon = static_cast<int>(std::lround(value));
      } else if (config.ablate_axis == "threshold") {
        planner.threshold = value;
      } else if (config.ablate_axis == "kappa") {
        planner.kappa = value;
      } else {
        planner.beta = value;
      }
      Log(options, config.ablate_axis + " = " + io::FormatDouble(value) + ", " + name);
      const std::vector<EpisodeRecord> records = EvaluateEpisodes(
          config.env, models.Bundle(), planner, constraints, config.eval_seeds,
          config.eval_episodes, config.threads);
      std::vector<double> returns, violations;
      int failed = 0;
      for (const EpisodeRecord& r : records) {
        if (r.failed) {
          ++failed;
          std::cerr << "[mopp] " << name << " seed " << r.seed << " episode "
                    << r.episode << " failed: " << r.error << '\n';
          continue;
        }
        returns.push_back(r.result.total_return);
        violations.push_back(r.result.violations);
      }
      failures += failed;
      out << config.ablate_axis << ',' << io::FormatDouble(value) << ',' << name
          << ',' << io::FormatDouble(Mean(returns)) << ','
          << io::FormatDouble(PopulationStd(returns)) << ','
          << io::FormatDouble(Mean(violations)) << ',' << returns.size() << ','
          << failed << '\n';
    }
  }
  WriteText(ResolvePath(options, "ablation.csv"), out.str());
  return failures == 0 ? 0 : 1;
}

int RunCli(int argc, char** argv) {
  CLI::App app{"MOPP model-based offline planning"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  CommandOptions options;
  app.add_option("--config", config_path, "Run configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base seed for data generation and training");
  app.add_option("--out", options.out_dir, "Output and artifact directory");
  app.add_flag("--quiet", options.quiet, "Suppress progress messages");
  app.require_subcommand(1, 1);
  app.fallthrough();
  CLI::App* gen = app.add_subcommand("gen-data", "Generate the offline dataset");
  CLI::App* dyn = app.add_subcommand("train-dynamics", "Train the dynamics ensemble");
  CLI::App* beh = app.add_subcommand("train-behavior", "Train the behavior ensemble");
  CLI::App* trq = app.add_subcommand("train-q", "Fitted Q evaluation");
  CLI::App* eva = app.add_subcommand("evaluate", "Closed-loop planner evaluation");
  CLI::App* abl = app.add_subcommand("ablate", "Planner ablation sweep");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : LoadRunConfig(config_path);
    if (seed) config.seed = *seed;
    fs::create_directories(options.out_dir);
    if (gen->parsed()) CmdGenData(config, options);
    if (dyn->parsed()) CmdTrainDynamics(config, options);
    if (beh->parsed()) CmdTrainBehavior(config, options);
    if (trq->parsed()) CmdTrainQ(config, options);
    if (eva->parsed()) return CmdEvaluate(config, options);
    if (abl->parsed()) return CmdAblate(config, options);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mopp: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mopp::cli
