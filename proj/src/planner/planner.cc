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

#include "mopp/planner/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "mopp/errors.h"

namespace mopp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStdFloor = 1e-6;

nn::Matrix ToFloat(const Eigen::MatrixXd& m) { return m.cast<float>(); }

bool HasBounds(const ModelBundle& models) {
  return models.action_low.size() > 0;
}

// Rows of `states` grouped by the member they use, in ascending row order.
std::vector<std::vector<int>> GroupRows(std::span<const int> member,
                                        int members) {
  std::vector<std::vector<int>> groups(members);
  for (std::size_t i = 0; i < member.size(); ++i) {
    if (member[i] < 0 || member[i] >= members) {
      throw IndexError("behavior member index out of range");
    }
    groups[member[i]].push_back(static_cast<int>(i));
  }
  return groups;
}

}  // namespace

void PlannerConfig::Validate() const {
  if (horizon < 1) throw ConfigError("planner horizon must be >= 1");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("planner kappa must be positive");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("planner beta must lie in [0, 1]");
  }
  if (!(threshold > 0.0)) throw ConfigError("planner threshold L must be positive");
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) {
    throw ConfigError("planner sigma_M must be positive");
  }
  if (num_rollouts < 1) throw ConfigError("planner needs at least one rollout");
  if (min_trajectories < 0 || min_trajectories > num_rollouts) {
    throw ConfigError("planner N_m must lie in [1, N] (0 selects the default)");
  }
  if (candidates < 1) throw ConfigError("planner m must be >= 1");
  if (value_samples < 1) throw ConfigError("planner K_Q must be >= 1");
}

int PlannerConfig::MinTrajectories() const {
  if (min_trajectories > 0) return min_trajectories;
  return std::max(1, static_cast<int>(std::floor(0.2 * num_rollouts)));
}

void ModelBundle::Validate(const PlannerConfig& config) const {
  if (dynamics == nullptr || behavior == nullptr) {
    throw ConfigError("planner needs dynamics and behavior ensembles");
  }
  if (dynamics->role() != adm::AdmRole::kDynamics ||
      behavior->role() != adm::AdmRole::kBehavior) {
    throw ConfigError("planner ensembles have the wrong roles");
  }
  if (dynamics->size() < 2) {
    throw ConfigError("dynamics ensemble needs at least two members");
  }
  const int s = behavior->input_dim();
  const int a = behavior->output_dim();
  if (dynamics->input_dim() != s + a || dynamics->output_dim() != s + 1) {
    throw ShapeError("dynamics ensemble dimensions do not match the behavior");
  }
  const bool needs_q =
      (config.use_max_q && config.candidates > 1) || config.use_value;
  if (needs_q && q == nullptr) {
    throw ConfigError("max-Q and the value bonus need a Q network");
  }
  if (q != nullptr && (q->state_dim() != s || q->action_dim() != a)) {
    throw ShapeError("Q network dimensions do not match the behavior");
  }
  if (action_low.size() != action_high.size() ||
      (action_low.size() != 0 && action_low.size() != a)) {
    throw ShapeError("action bounds must be empty or match the action dim");
  }
  if ((action_low.array() > action_high.array()).any()) {
    throw ConfigError("action lower bound exceeds upper bound");
  }
}

ActionPlan ZeroPlan(const PlannerConfig& config, int action_dim) {
  return ActionPlan::Zero(config.horizon, action_dim);
}

Eigen::VectorXd ScaleStd(const Eigen::VectorXd& sigma, double sigma_max) {
  if (!(sigma_max > 0.0)) throw ConfigError("sigma_M must be positive");
  if (sigma.size() == 0) return sigma;
  if ((sigma.array() < 0.0).any()) throw DomainError("negative std");
  const double largest = sigma.maxCoeff();
  if (!(largest >= kStdFloor)) {
    return Eigen::VectorXd::Constant(sigma.size(), sigma_max);
  }
  return sigma * (sigma_max / largest);
}

Eigen::MatrixXd GuidedActionBatch(const Eigen::MatrixXd& states,
                                  std::span<const int> member,
                                  const ModelBundle& models,
                                  const PlannerConfig& config,
                                  std::span<Rng* const> rngs) {
  const int n = static_cast<int>(states.rows());
  if (static_cast<int>(member.size()) != n || static_cast<int>(rngs.size()) != n) {
    throw ShapeError("guided action: one member and rng per state required");
  }
  const adm::AdmEnsemble& behavior = *models.behavior;
  const int a_dim = behavior.output_dim();
  const int m = config.use_max_q ? config.candidates : 1;
  if (m > 1 && models.q == nullptr) throw ConfigError("max-Q needs a Q network");

  Eigen::MatrixXd mean(n, a_dim);
  Eigen::MatrixXd std(n, a_dim);
  const auto groups = GroupRows(member, behavior.size());
  for (int k = 0; k < behavior.size(); ++k) {
    const std::vector<int>& rows = groups[k];
    if (rows.empty()) continue;
    nn::Matrix x = ToFloat(states(rows, Eigen::all));
    adm::AdmModel::BatchDistribution dist = behavior.member(k).DistributionBatch(x);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      mean.row(rows[i]) = dist.mean.row(i).cast<double>();
      std.row(rows[i]) = dist.std.row(i).cast<double>();
    }
  }

  Eigen::MatrixXd candidates(static_cast<Eigen::Index>(n) * m, a_dim);
  for (int r = 0; r < n; ++r) {
    const Eigen::VectorXd scaled = ScaleStd(std.row(r).transpose(), config.sigma_max);
    for (int c = 0; c < m; ++c) {
      auto row = candidates.row(static_cast<Eigen::Index>(r) * m + c);
      for (int d = 0; d < a_dim; ++d) {
        row[d] = mean(r, d) + scaled[d] * StandardNormal(*rngs[r]);
      }
      if (HasBounds(models)) {
        row = row.cwiseMax(models.action_low.transpose())
                  .cwiseMin(models.action_high.transpose());
      }
    }
  }
  if (m == 1) return candidates;

  nn::Matrix repeated(static_cast<Eigen::Index>(n) * m, states.cols());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) {
      repeated.row(static_cast<Eigen::Index>(r) * m + c) = states.row(r).cast<float>();
    }
  }
  const Eigen::VectorXf values = models.q->ValueBatch(repeated, ToFloat(candidates));
  Eigen::MatrixXd chosen(n, a_dim);
  for (int r = 0; r < n; ++r) {
    int best = 0;
    float best_value = -std::numeric_limits<float>::infinity();
    for (int c = 0; c < m; ++c) {
      const float v = values[static_cast<Eigen::Index>(r) * m + c];
      if (v > best_value) {
        best_value = v;
        best = c;
      }
    }
    chosen.row(r) = candidates.row(static_cast<Eigen::Index>(r) * m + best);
  }
  return chosen;
}

Eigen::VectorXd GuidedAction(const Eigen::VectorXd& state,
                             const adm::AdmModel& behavior,
                             const ModelBundle& models,
                             const PlannerConfig& config, Rng& rng) {
  // Route through the batch path with a one-member view of the ensemble.
  adm::AdmEnsemble single(adm::AdmRole::kBehavior, {behavior});
  ModelBundle view = models;
  view.behavior = &single;
  const int member[] = {0};
  Rng* streams[] = {&rng};
  return GuidedActionBatch(state.transpose(), member, view, config, streams)
      .row(0)
      .transpose();
}

RolloutSet Rollout(const Eigen::VectorXd& state, const ModelBundle& models,
                   const ActionPlan& plan, const PlannerConfig& config,
                   const Constraints& constraints, std::uint64_t seed) {
  const int n = config.num_rollouts;
  const int h = config.horizon;
  const int s_dim = models.state_dim();
  const int a_dim = models.action_dim();
  if (state.size() != s_dim) throw ShapeError("rollout: state dimension mismatch");
  if (plan.rows() != h || plan.cols() != a_dim) {
    throw ShapeError("rollout: plan must be H x |A|");
  }
  const adm::AdmEnsemble& dynamics = *models.dynamics;
  const adm::AdmEnsemble& behavior = *models.behavior;

  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (int i = 0; i < n; ++i) rngs.emplace_back(DeriveSeed(seed, i));

  RolloutSet set;
  set.states.assign(n, Eigen::MatrixXd::Zero(h, s_dim));
  set.actions.assign(n, Eigen::MatrixXd::Zero(h, a_dim));
  set.returns = Eigen::VectorXd::Zero(n);
  set.uncertainty = Eigen::MatrixXd::Zero(n, h);
  set.aborted.assign(n, false);
  Eigen::MatrixXd current = state.transpose().replicate(n, 1);

  for (int t = 0; t < h; ++t) {
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
      if (!set.aborted[i]) active.push_back(i);
    }
    if (active.empty()) break;
    const int count = static_cast<int>(active.size());
    std::vector<int> member(count);
    std::vector<Rng*> streams(count);
    for (int j = 0; j < count; ++j) {
      streams[j] = &rngs[active[j]];
      member[j] = UniformIndex(*streams[j], behavior.size());
    }
    const Eigen::MatrixXd s_t = current(active, Eigen::all);
    const Eigen::MatrixXd guided =
        GuidedActionBatch(s_t, member, models, config, streams);
    std::vector<int> model_member(count);
    for (int j = 0; j < count; ++j) {
      model_member[j] = UniformIndex(*streams[j], dynamics.size());
    }

    const Eigen::RowVectorXd previous = plan.row(std::min(t + 1, h - 1));
    Eigen::MatrixXd mixed(count, a_dim);
    for (int j = 0; j < count; ++j) {
      mixed.row(j) = (1.0 - config.beta) * guided.row(j) + config.beta * previous;
    }
    nn::Matrix inputs(count, s_dim + a_dim);
    inputs << s_t.cast<float>(), mixed.cast<float>();
    const adm::AdmEnsemble::BatchPrediction prediction = dynamics.PredictBatch(inputs);
    const Eigen::VectorXd disc = adm::DiscBatch(prediction.normalized);

    for (int j = 0; j < count; ++j) {
      const int i = active[j];
      set.states[i].row(t) = s_t.row(j);
      set.actions[i].row(t) = mixed.row(j);
      double reward = 0.0;
      for (const nn::Matrix& raw : prediction.raw) reward += raw(j, 0);
      reward /= dynamics.size();
      const Eigen::RowVectorXd next =
          prediction.raw[model_member[j]].row(j).tail(s_dim).cast<double>();
      double penalty = 0.0;
      if (constraints.reward_transform || constraints.rollout_penalty) {
        // Hooks score the state the step reaches, as the environment does.
        const Eigen::VectorXd s_vec = next.transpose();
        const Eigen::VectorXd a_vec = mixed.row(j).transpose();
        if (constraints.reward_transform) {
          reward = constraints.reward_transform(s_vec, a_vec, reward);
        }
        if (constraints.rollout_penalty) {
          penalty = constraints.rollout_penalty(s_vec, a_vec);
        }
      }
      if (!std::isfinite(reward) || !std::isfinite(disc[j]) ||
          !next.allFinite()) {
        // Model blow-up: freeze the rollout and make pruning discard it.
        set.aborted[i] = true;
        set.uncertainty.row(i).tail(h - t).setConstant(kInf);
        for (int k = t + 1; k < h; ++k) {
          set.states[i].row(k) = s_t.row(j);
          set.actions[i].row(k) = mixed.row(j);
        }
        continue;
      }
      set.returns[i] += reward;
      set.uncertainty(i, t) = disc[j] + penalty;
      current.row(i) = next;
    }
  }

  if (config.use_value) {
    const int k_q = config.value_samples;
    std::vector<int> active;
    std::vector<int> member;
    for (int i = 0; i < n; ++i) {
      if (set.aborted[i]) continue;
      active.push_back(i);
      member.push_back(UniformIndex(rngs[i], behavior.size()));
    }
    const auto groups = GroupRows(member, behavior.size());
    for (int k = 0; k < behavior.size(); ++k) {
      const std::vector<int>& rows = groups[k];
      if (rows.empty()) continue;
      const Eigen::Index total = static_cast<Eigen::Index>(rows.size()) * k_q;
      nn::Matrix x(total, s_dim);
      std::vector<Rng*> streams(total);
      for (std::size_t g = 0; g < rows.size(); ++g) {
        const int i = active[rows[g]];
        for (int c = 0; c < k_q; ++c) {
          x.row(g * k_q + c) = current.row(i).cast<float>();
          streams[g * k_q + c] = &rngs[i];
        }
      }
      const nn::Matrix sampled = behavior.member(k).SampleBatch(x, streams);
      const Eigen::VectorXf values = models.q->ValueBatch(x, sampled);
      for (std::size_t g = 0; g < rows.size(); ++g) {
        double total_value = 0.0;
        for (int c = 0; c < k_q; ++c) total_value += values[g * k_q + c];
        const double v = total_value / k_q;
        if (std::isfinite(v)) set.returns[active[rows[g]]] += v;
      }
    }
  }
  return set;
}

std::vector<int> TrajPrune(const Eigen::MatrixXd& uncertainty, double threshold,
                           int min_trajectories) {
  const int n = static_cast<int>(uncertainty.rows());
  if (min_trajectories < 1 || min_trajectories > n) {
    throw ConfigError("pruning needs 1 <= N_m <= number of trajectories");
  }
  std::vector<int> kept;
  std::vector<std::pair<double, int>> rest;
  for (int i = 0; i < n; ++i) {
    if ((uncertainty.row(i).array() < threshold).all()) {
      kept.push_back(i);
    } else {
      rest.emplace_back(uncertainty.row(i).sum(), i);
    }
  }
  if (static_cast<int>(kept.size()) < min_trajectories) {
    const std::size_t need = min_trajectories - kept.size();
    std::partial_sort(rest.begin(), rest.begin() + need, rest.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first < b.first;
                        return a.second < b.second;
                      });
    for (std::size_t j = 0; j < need; ++j) kept.push_back(rest[j].second);
    std::sort(kept.begin(), kept.end());
  }
  return kept;
}

ActionPlan MppiUpdate(std::span<const Eigen::MatrixXd> actions,
                      std::span<const double> returns, double kappa) {
  if (actions.empty()) throw std::logic_error("MPPI update on an empty set");
  if (actions.size() != returns.size()) {
    throw ShapeError("MPPI update: one return per trajectory required");
  }
  double best = -kInf;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    if (!std::isfinite(returns[i])) throw DomainError("MPPI returns must be finite");
    if (actions[i].rows() != actions[0].rows() ||
        actions[i].cols() != actions[0].cols()) {
      throw ShapeError("MPPI update: ragged action sequences");
    }
    best = std::max(best, returns[i]);
  }
  ActionPlan weighted = ActionPlan::Zero(actions[0].rows(), actions[0].cols());
  double total = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double w = std::exp(kappa * (returns[i] - best));
    weighted += w * actions[i];
    total += w;
  }
  return weighted / total;
}

PlanStepResult PlanStep(const Eigen::VectorXd& state, const ModelBundle& models,
                        const PlannerConfig& config,
                        const Constraints& constraints, ActionPlan& plan,
                        std::uint64_t seed) {
  config.Validate();
  models.Validate(config);
  const RolloutSet set = Rollout(state, models, plan, config, constraints, seed);

  std::vector<int> kept;
  if (config.use_pruning) {
    kept = TrajPrune(set.uncertainty, config.threshold, config.MinTrajectories());
  } else {
    kept.resize(set.size());
    std::iota(kept.begin(), kept.end(), 0);
  }
  std::vector<Eigen::MatrixXd> actions;
  std::vector<double> returns;
  actions.reserve(kept.size());
  returns.reserve(kept.size());
  for (int i : kept) {
    actions.push_back(set.actions[i]);
    returns.push_back(set.returns[i]);
  }
  plan = MppiUpdate(actions, returns, config.kappa);

  PlanStepResult result;
  result.action = plan.row(0).transpose();
  StepDiagnostics& d = result.diagnostics;
  d.return_mean = set.returns.mean();
  d.return_max = set.returns.maxCoeff();
  double u_sum = 0.0;
  long u_count = 0;
  d.u_max = -kInf;
  for (int i = 0; i < set.size(); ++i) {
    if ((set.uncertainty.row(i).array() < config.threshold).all()) ++d.surviving;
    for (int t = 0; t < config.horizon; ++t) {
      const double u = set.uncertainty(i, t);
      if (!std::isfinite(u)) continue;
      u_sum += u;
      ++u_count;
      d.u_max = std::max(d.u_max, u);
    }
  }
  if (u_count > 0) {
    d.u_mean = u_sum / u_count;
  } else {
    d.u_mean = kInf;
    d.u_max = kInf;
  }
  return result;
}

double UncertaintyPercentile(const adm::AdmEnsemble& dynamics,
                             const Dataset& dataset, double percentile) {
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw ConfigError("percentile must lie in [0, 100]");
  }
  if (dataset.empty()) throw DataError("uncertainty percentile needs data");
  const int s_dim = dataset.state_dim();
  const int a_dim = dataset.action_dim();
  if (dynamics.input_dim() != s_dim + a_dim) {
    throw ShapeError("dataset does not match the dynamics ensemble");
  }
  std::vector<double> values;
  values.reserve(dataset.size());
  constexpr int kChunk = 4096;
  for (int begin = 0; begin < dataset.size(); begin += kChunk) {
    const int rows = std::min(kChunk, dataset.size() - begin);
    nn::Matrix x(rows, s_dim + a_dim);
    x << dataset.states().middleRows(begin, rows),
        dataset.actions().middleRows(begin, rows);
    const Eigen::VectorXd disc =
        adm::DiscBatch(dynamics.PredictBatch(x).normalized);
    for (int r = 0; r < rows; ++r) {
      if (std::isfinite(disc[r])) values.push_back(disc[r]);
    }
  }
  if (values.empty()) throw DataError("no finite discrepancy on the dataset");
  std::sort(values.begin(), values.end());
  const double position = percentile / 100.0 * (values.size() - 1);
  const std::size_t lower = static_cast<std::size_t>(std::floor(position));
  const std::size_t upper = std::min(lower + 1, values.size() - 1);
  const double frac = position - lower;
  return values[lower] + frac * (values[upper] - values[lower]);
}

}  // namespace mopp
