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

#include "mopp/value/fqe.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "mopp/errors.h"
#include "mopp/nn/adam.h"
#include "mopp/nn/losses.h"

namespace mopp::value {

QNetwork FqeTrain(const Dataset& dataset, const FqeConfig& config,
                  FqeReport* report) {
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw ConfigError("FQE discount must lie in [0, 1)");
  }
  if (config.iterations < 1 || config.steps_per_iteration < 0 ||
      config.batch_size < 1) {
    throw ConfigError("invalid FQE schedule");
  }
  if (dataset.empty()) throw DataError("FQE needs a non-empty dataset");

  const std::vector<int> next = dataset.NextIndices();
  std::vector<int> rows;       // transitions with a regression target
  std::vector<int> successor;  // index of (s_{i+1}, a_{i+1}) or -1
  int pairs = 0;
  for (int i = 0; i < dataset.size(); ++i) {
    if (next[i] == Dataset::kTruncated) continue;
    rows.push_back(i);
    successor.push_back(next[i] >= 0 ? next[i] : -1);
    if (next[i] >= 0) ++pairs;
  }
  if (pairs == 0) {
    throw DataError("FQE needs consecutive (s, a, s', a') pairs within episodes");
  }

  const int s_dim = dataset.state_dim();
  const int a_dim = dataset.action_dim();
  const int n = static_cast<int>(rows.size());
  nn::Matrix inputs(n, s_dim + a_dim);
  Eigen::VectorXd rewards(n);
  std::vector<int> pair_rows;  // positions in `rows` that have a successor
  std::vector<int> pair_next;
  for (int k = 0; k < n; ++k) {
    const int i = rows[k];
    for (int d = 0; d < s_dim; ++d) inputs(k, d) = dataset.state(i)[d];
    for (int d = 0; d < a_dim; ++d) inputs(k, s_dim + d) = dataset.action(i)[d];
    rewards[k] = dataset.reward(i);
    if (successor[k] >= 0) {
      pair_rows.push_back(k);
      pair_next.push_back(successor[k]);
    }
  }
  nn::Matrix next_inputs(static_cast<Eigen::Index>(pair_next.size()),
                         s_dim + a_dim);
  for (std::size_t p = 0; p < pair_next.size(); ++p) {
    const int j = pair_next[p];
    for (int d = 0; d < s_dim; ++d) next_inputs(p, d) = dataset.state(j)[d];
    for (int d = 0; d < a_dim; ++d) next_inputs(p, s_dim + d) = dataset.action(j)[d];
  }

  QNetwork q(s_dim, a_dim, config.hidden);
  {
    Eigen::MatrixXd x = inputs.cast<double>();
    Eigen::VectorXd mean = x.colwise().mean().transpose();
    Eigen::VectorXd var =
        (x.rowwise() - mean.transpose()).array().square().colwise().mean();
    q.set_input_normalization(
        mean.cast<float>(),
        var.cwiseSqrt().cast<float>().cwiseMax(1e-6f));
    // value scale ~ reward magnitude / (1 - gamma); linear in the rewards
    double r_mean = rewards.mean();
    double r_std = std::sqrt((rewards.array() - r_mean).square().mean());
    double scale = std::max(std::abs(r_mean), r_std) / (1.0 - config.gamma);
    q.set_output_scale(scale > 1e-6 ? static_cast<float>(scale) : 1.0f);
  }
  Rng rng(config.seed);
  q.net().InitializeGlorot(rng);
  // Q^0 = 0
  q.net().parameters().back().weight.setZero();
  q.net().parameters().back().bias.setZero();

  const nn::Matrix x_normalized = q.NormalizeInputs(inputs);
  const nn::Matrix next_normalized = q.NormalizeInputs(next_inputs);
  const double inv_scale = 1.0 / q.output_scale();
  Eigen::VectorXd scaled_rewards = rewards * inv_scale;

  nn::AdamOptions options;
  options.learning_rate = config.learning_rate;
  nn::AdamState<float> adam(q.net(), options);
  const nn::LossSpec loss_spec{nn::LossKind::kSquaredError, 1.0};
  const int batch = std::min(config.batch_size, n);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> index(batch);
  nn::Matrix targets(n, 1);
  Eigen::VectorXf previous = q.net().ForwardBatch(x_normalized).col(0);
  std::int64_t global_step = 0;

  for (int k = 0; k < config.iterations; ++k) {
    // y = r + gamma * Q^{k-1}(s', a') in normalized value units
    Eigen::VectorXf next_values = q.net().ForwardBatch(next_normalized).col(0);
    for (int r = 0; r < n; ++r) targets(r, 0) = static_cast<float>(scaled_rewards[r]);
    for (std::size_t p = 0; p < pair_rows.size(); ++p) {
      targets(pair_rows[p], 0) += static_cast<float>(config.gamma * next_values[p]);
    }
    for (int step = 0; step < config.steps_per_iteration; ++step, ++global_step) {
      for (int& i : index) i = pick(rng);
      nn::Matrix xb = x_normalized(index, Eigen::all);
      nn::Matrix yb = targets(index, Eigen::all);
      double loss = 0.0;
      nn::Parameters<float> grads = nn::Backprop(q.net(), loss_spec, xb, yb, &loss);
      if (!std::isfinite(loss)) {
        throw TrainingError("FQE diverged (non-finite loss)", global_step);
      }
      nn::AdamStep(q.net(), grads, adam);
    }
    Eigen::VectorXf current = q.net().ForwardBatch(x_normalized).col(0);
    if (report != nullptr) {
      report->max_change.push_back(
          (current - previous).cwiseAbs().maxCoeff() * q.output_scale());
    }
    previous = std::move(current);
  }
  if (report != nullptr) report->training_pairs = pairs;
  return q;
}

double VEstimate(const QNetwork& q, const adm::AdmEnsemble& behavior,
                 std::span<const float> state, int samples, Rng& rng) {
  if (samples < 1) throw ConfigError("value estimate needs at least one sample");
  if (static_cast<int>(state.size()) != q.state_dim() ||
      behavior.input_dim() != q.state_dim()) {
    throw ShapeError("value estimate: state dimension mismatch");
  }
  const adm::AdmModel& member = behavior.member(UniformIndex(rng, behavior.size()));
  nn::Matrix states(samples, q.state_dim());
  for (int r = 0; r < samples; ++r) {
    for (int d = 0; d < q.state_dim(); ++d) states(r, d) = state[d];
  }
  std::vector<Rng*> streams(samples, &rng);
  nn::Matrix actions = member.SampleBatch(states, streams);
  Eigen::VectorXf values = q.ValueBatch(states, actions);
  double total = 0.0;
  for (Eigen::Index r = 0; r < values.size(); ++r) total += values[r];
  return total / samples;
}

}  // namespace mopp::value
