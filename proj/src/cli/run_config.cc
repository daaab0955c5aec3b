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

#include "mopp/cli/run_config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <string_view>

#include "mopp/envs/policies.h"
#include "mopp/errors.h"

namespace mopp::cli {
namespace {

using Setter = std::function<void(const std::string&)>;
using Getter = std::function<std::string()>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
};

int ToInt(const std::string& text) {
  int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("expected an integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t ToU64(const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

double ToDouble(const std::string& text) {
  const std::vector<double> values = io::ParseDoubles(text);
  if (values.size() != 1) throw ConfigError("expected one number, got '" + text + "'");
  return values[0];
}

bool ToBool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

std::string FromBool(bool value) { return value ? "true" : "false"; }

std::string FromDoubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ' ';
    out += io::FormatDouble(values[i]);
  }
  return out;
}

std::string FromStrings(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ' ';
    out += values[i];
  }
  return out;
}

Field IntField(std::string section, std::string key, int* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = ToInt(v); },
          [target] { return std::to_string(*target); }};
}

Field U64Field(std::string section, std::string key, std::uint64_t* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = ToU64(v); },
          [target] { return std::to_string(*target); }};
}

Field DoubleField(std::string section, std::string key, double* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = ToDouble(v); },
          [target] { return io::FormatDouble(*target); }};
}

Field BoolField(std::string section, std::string key, bool* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = ToBool(v); },
          [target] { return FromBool(*target); }};
}

Field StringField(std::string section, std::string key, std::string* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = v; },
          [target] { return *target; }};
}

Field IntListField(std::string section, std::string key,
                   std::vector<int>* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = io::ParseInts(v); },
          [target] { return io::FormatInts(*target); }};
}

Field DoubleListField(std::string section, std::string key,
                      std::vector<double>* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = io::ParseDoubles(v); },
          [target] { return FromDoubles(*target); }};
}

Field StringListField(std::string section, std::string key,
                      std::vector<std::string>* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) { *target = io::SplitList(v); },
          [target] { return FromStrings(*target); }};
}

Field ActivationField(std::string section, std::string key,
                      nn::Activation* target) {
  return {std::move(section), std::move(key),
          [target](const std::string& v) {
            if (v == "relu") {
              *target = nn::Activation::kRelu;
            } else if (v == "tanh") {
              *target = nn::Activation::kTanh;
            } else {
              throw ConfigError("activation must be relu or tanh, got '" + v + "'");
            }
          },
          [target] {
            return std::string(*target == nn::Activation::kRelu ? "relu" : "tanh");
          }};
}

std::vector<Field> Fields(RunConfig& c) {
  std::vector<Field> f;
  f.push_back(U64Field("run", "seed", &c.seed));

  f.push_back(StringField("env", "name", &c.env));

  f.push_back(StringListField("data", "quality", &c.qualities));
  f.push_back(DoubleListField("data", "mix", &c.mix));
  f.push_back(IntField("data", "episodes", &c.episodes));

  f.push_back(IntField("adm", "dynamics_members", &c.dynamics.ensemble_size));
  f.push_back(IntField("adm", "behavior_members", &c.behavior.ensemble_size));
  f.push_back(IntField("adm", "embedding", &c.dynamics.architecture.embedding_size));
  f.push_back(IntListField("adm", "hidden", &c.dynamics.architecture.head_hidden));
  f.push_back(ActivationField("adm", "activation", &c.dynamics.architecture.activation));
  f.push_back(IntField("adm", "steps", &c.dynamics.steps));
  f.push_back(IntField("adm", "batch", &c.dynamics.batch_size));
  f.push_back(DoubleField("adm", "learning_rate", &c.dynamics.learning_rate));

  f.push_back(DoubleField("fqe", "gamma", &c.fqe.gamma));
  f.push_back(IntField("fqe", "iterations", &c.fqe.iterations));
  f.push_back(IntField("fqe", "steps_per_iteration", &c.fqe.steps_per_iteration));
  f.push_back(IntField("fqe", "batch", &c.fqe.batch_size));
  f.push_back(DoubleField("fqe", "learning_rate", &c.fqe.learning_rate));
  f.push_back(IntListField("fqe", "hidden", &c.fqe.hidden));
  f.push_back(StringField("fqe", "reward_transform", &c.fqe_reward_transform));

  PlannerConfig& p = c.planner;
  f.push_back(IntField("planner", "horizon", &p.horizon));
  f.push_back(DoubleField("planner", "kappa", &p.kappa));
  f.push_back(DoubleField("planner", "beta", &p.beta));
  f.push_back({"planner", "threshold",
               [&c](const std::string& v) {
                 if (v == "auto") {
                   c.threshold_auto = true;
                 } else {
                   c.threshold_auto = false;
                   c.planner.threshold = ToDouble(v);
                 }
               },
               [&c] {
                 return c.threshold_auto ? std::string("auto")
                                         : io::FormatDouble(c.planner.threshold);
               }});
  f.push_back(DoubleField("planner", "threshold_percentile", &c.threshold_percentile));
  f.push_back(DoubleField("planner", "sigma_max", &p.sigma_max));
  f.push_back(IntField("planner", "rollouts", &p.num_rollouts));
  f.push_back(IntField("planner", "min_trajectories", &p.min_trajectories));
  f.push_back(IntField("planner", "candidates", &p.candidates));
  f.push_back(IntField("planner", "value_samples", &p.value_samples));
  f.push_back(BoolField("planner", "use_max_q", &p.use_max_q));
  f.push_back(BoolField("planner", "use_pruning", &p.use_pruning));
  f.push_back(BoolField("planner", "use_value", &p.use_value));

  f.push_back(StringField("constraints", "mode", &c.constraint_mode));
  f.push_back(DoubleField("constraints", "alpha_c", &c.alpha_c));
  f.push_back(DoubleField("constraints", "alpha_r", &c.alpha_r));
  f.push_back(DoubleField("constraints", "velocity_cap", &c.velocity_cap));

  f.push_back({"eval", "seeds",
               [&c](const std::string& v) {
                 c.eval_seeds.clear();
                 for (const std::string& s : io::SplitList(v)) {
                   c.eval_seeds.push_back(ToU64(s));
                 }
               },
               [&c] {
                 std::string out;
                 for (std::size_t i = 0; i < c.eval_seeds.size(); ++i) {
                   if (i > 0) out += ' ';
                   out += std::to_string(c.eval_seeds[i]);
                 }
                 return out;
               }});
  f.push_back(IntField("eval", "episodes", &c.eval_episodes));
  f.push_back(IntField("eval", "threads", &c.threads));
  f.push_back(BoolField("eval", "diagnostics", &c.diagnostics));

  f.push_back(StringField("ablate", "axis", &c.ablate_axis));
  f.push_back(DoubleListField("ablate", "values", &c.ablate_values));
  f.push_back(StringListField("ablate", "toggles", &c.ablate_toggles));

  f.push_back(StringField("paths", "dataset", &c.dataset_path));
  f.push_back(StringField("paths", "dynamics", &c.dynamics_dir));
  f.push_back(StringField("paths", "behavior", &c.behavior_dir));
  f.push_back(StringField("paths", "q", &c.q_dir));
  return f;
}

// The ADM keys configure both ensembles; only the member counts differ.
void SyncBehaviorFromDynamics(RunConfig& c) {
  const int members = c.behavior.ensemble_size;
  c.behavior = c.dynamics;
  c.behavior.ensemble_size = members;
}

}  // namespace

Toggle ParseToggle(const std::string& name) {
  Toggle toggle;
  toggle.name = name;
  if (name == "full") return toggle;
  std::string_view rest = name;
  while (!rest.empty()) {
    const std::size_t dash = rest.find('-');
    const std::string_view part = rest.substr(0, dash);
    if (part == "noMQ") {
      toggle.use_max_q = false;
    } else if (part == "noP") {
      toggle.use_pruning = false;
    } else if (part == "noV") {
      toggle.use_value = false;
    } else {
      throw ConfigError("unknown ablation toggle '" + name +
                        "' (use full or noMQ/noP/noV joined by '-')");
    }
    rest = dash == std::string_view::npos ? std::string_view() : rest.substr(dash + 1);
  }
  return toggle;
}

void RunConfig::Validate() const {
  MakeEnvironment(env);
  if (qualities.empty()) throw ConfigError("[data] quality must not be empty");
  for (const std::string& q : qualities) ParsePolicyQuality(q);
  if (mix.size() != qualities.size()) {
    throw ConfigError("[data] mix needs one ratio per quality");
  }
  if (episodes < 1) throw ConfigError("[data] episodes must be >= 1");
  if (dynamics.ensemble_size < 2) {
    throw ConfigError("[adm] dynamics_members must be >= 2 for the discrepancy");
  }
  if (behavior.ensemble_size < 1) throw ConfigError("[adm] behavior_members must be >= 1");
  if (dynamics.architecture.embedding_size < 1 || dynamics.steps < 0 ||
      dynamics.batch_size < 1 || !(dynamics.learning_rate > 0.0)) {
    throw ConfigError("invalid [adm] training settings");
  }
  for (int h : dynamics.architecture.head_hidden) {
    if (h < 1) throw ConfigError("[adm] hidden sizes must be positive");
  }
  if (!(fqe.gamma >= 0.0 && fqe.gamma < 1.0)) {
    throw ConfigError("[fqe] gamma must lie in [0, 1)");
  }
  if (fqe.iterations < 1 || fqe.steps_per_iteration < 0 || fqe.batch_size < 1 ||
      !(fqe.learning_rate > 0.0)) {
    throw ConfigError("invalid [fqe] training settings");
  }
  for (int h : fqe.hidden) {
    if (h < 1) throw ConfigError("[fqe] hidden sizes must be positive");
  }
  if (fqe_reward_transform != "none" && fqe_reward_transform != "jump" &&
      fqe_reward_transform != "penalty") {
    throw ConfigError("[fqe] reward_transform must be none, jump or penalty");
  }
  planner.Validate();
  if (!(threshold_percentile >= 0.0 && threshold_percentile <= 100.0)) {
    throw ConfigError("[planner] threshold_percentile must lie in [0, 100]");
  }
  if (constraint_mode != "none" && constraint_mode != "reward_penalty" &&
      constraint_mode != "rollout_penalty" && constraint_mode != "jump") {
    throw ConfigError(
        "[constraints] mode must be none, reward_penalty, rollout_penalty or jump");
  }
  if (!(alpha_c >= 0.0 && alpha_c <= 1.0) || !(alpha_r >= 0.0 && alpha_r <= 1.0)) {
    throw ConfigError("[constraints] alpha_c and alpha_r must lie in [0, 1]");
  }
  if (eval_seeds.empty()) throw ConfigError("[eval] seeds must not be empty");
  if (eval_episodes < 1) throw ConfigError("[eval] episodes must be >= 1");
  if (threads < 1) throw ConfigError("[eval] threads must be >= 1");
  if (ablate_axis != "sigma_max" && ablate_axis != "horizon" &&
      ablate_axis != "threshold" && ablate_axis != "kappa" && ablate_axis != "beta") {
    throw ConfigError(
        "[ablate] axis must be sigma_max, horizon, threshold, kappa or beta");
  }
  if (ablate_values.empty()) throw ConfigError("[ablate] values must not be empty");
  if (ablate_toggles.empty()) throw ConfigError("[ablate] toggles must not be empty");
  for (const std::string& t : ablate_toggles) ParseToggle(t);
}

RunConfig ParseRunConfig(const io::KeyValueFile& file) {
  RunConfig config;
  std::vector<Field> fields = Fields(config);
  for (const io::KeyValueEntry& entry : file.entries()) {
    const std::string where = file.source() + ":" + std::to_string(entry.line);
    Field* match = nullptr;
    for (Field& field : fields) {
      if (field.section == entry.section && field.key == entry.key) match = &field;
    }
    if (match == nullptr) {
      throw ConfigError(where + ": unknown key '" + entry.key + "' in section [" +
                        entry.section + "]");
    }
    try {
      match->set(entry.value);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  SyncBehaviorFromDynamics(config);
  try {
    config.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(file.source() + ": " + e.what());
  }
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  return ParseRunConfig(io::KeyValueFile::Load(path));
}

io::KeyValueFile ToKeyValue(const RunConfig& config) {
  RunConfig copy = config;
  io::KeyValueFile file;
  for (const Field& field : Fields(copy)) {
    file.Set(field.section, field.key, field.get());
  }
  return file;
}

std::unique_ptr<PointMassEnv> MakeEnvironment(const std::string& name) {
  if (name == "pointmass") return MakePointMassEnv();
  if (name == "pointmass_constrained") return MakePointMassConstrainedEnv();
  throw ConfigError("unknown environment '" + name +
                    "' (pointmass or pointmass_constrained)");
}

Constraints MakeConstraints(const RunConfig& config) {
  if (config.constraint_mode == "reward_penalty") {
    return VelocityRewardPenalty(config.velocity_cap, config.alpha_c);
  }
  if (config.constraint_mode == "rollout_penalty") {
    return VelocityRolloutPenalty(config.velocity_cap);
  }
  if (config.constraint_mode == "jump") return JumpRewardTransform(config.alpha_r);
  return {};
}

Constraints MakeFqeRewardTransform(const RunConfig& config) {
  if (config.fqe_reward_transform == "penalty") {
    return VelocityRewardPenalty(config.velocity_cap, config.alpha_c);
  }
  if (config.fqe_reward_transform == "jump") return JumpRewardTransform(config.alpha_r);
  return {};
}

}  // namespace mopp::cli
