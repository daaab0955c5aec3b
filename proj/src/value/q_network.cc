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

#include "mopp/value/q_network.h"

#include <filesystem>
#include <utility>

#include "mopp/errors.h"
#include "mopp/io/key_value.h"
#include "mopp/nn/checkpoint.h"

namespace mopp::value {
namespace {

namespace fs = std::filesystem;

std::vector<int> QLayerSizes(int input_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes = {input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

}  // namespace

QNetwork::QNetwork(int state_dim, int action_dim, const std::vector<int>& hidden,
                   nn::Activation activation)
    : net_(QLayerSizes(state_dim + action_dim, hidden), activation),
      state_dim_(state_dim),
      input_mean_(Eigen::VectorXf::Zero(state_dim + action_dim)),
      input_std_(Eigen::VectorXf::Ones(state_dim + action_dim)) {
  if (state_dim < 1 || action_dim < 1) {
    throw ConfigError("Q network dimensions must be positive");
  }
}

QNetwork::QNetwork(nn::DenseNet net, int state_dim, Eigen::VectorXf input_mean,
                   Eigen::VectorXf input_std, float output_scale)
    : net_(std::move(net)), state_dim_(state_dim) {
  if (net_.output_dim() != 1 || state_dim < 1 || net_.input_dim() <= state_dim) {
    throw ShapeError("Q network must map (s, a) to a scalar");
  }
  set_input_normalization(std::move(input_mean), std::move(input_std));
  set_output_scale(output_scale);
}

void QNetwork::set_input_normalization(Eigen::VectorXf mean,
                                       Eigen::VectorXf std) {
  if (mean.size() != net_.input_dim() || std.size() != net_.input_dim()) {
    throw ShapeError("Q normalization width mismatch");
  }
  if ((std.array() <= 0.0f).any()) throw DomainError("Q input stds must be positive");
  input_mean_ = std::move(mean);
  input_std_ = std::move(std);
}

void QNetwork::set_output_scale(float scale) {
  if (!(scale > 0.0f)) throw DomainError("Q output scale must be positive");
  output_scale_ = scale;
}

nn::Matrix QNetwork::NormalizeInputs(const nn::Matrix& state_actions) const {
  if (state_actions.cols() != net_.input_dim()) {
    throw ShapeError("Q input has the wrong width");
  }
  nn::Matrix out = state_actions;
  out.rowwise() -= input_mean_.transpose();
  out.array().rowwise() /= input_std_.transpose().array();
  return out;
}

Eigen::VectorXf QNetwork::NormalizedValueBatch(
    const nn::Matrix& state_actions) const {
  return net_.ForwardBatch(NormalizeInputs(state_actions)).col(0);
}

Eigen::VectorXf QNetwork::ValueBatch(const nn::Matrix& state_actions) const {
  return NormalizedValueBatch(state_actions) * output_scale_;
}

Eigen::VectorXf QNetwork::ValueBatch(const nn::Matrix& states,
                                     const nn::Matrix& actions) const {
  if (states.rows() != actions.rows() || states.cols() != state_dim_ ||
      actions.cols() != action_dim()) {
    throw ShapeError("Q states and actions have the wrong shape");
  }
  nn::Matrix joined(states.rows(), net_.input_dim());
  joined << states, actions;
  return ValueBatch(joined);
}

double QNetwork::Value(std::span<const float> state,
                       std::span<const float> action) const {
  if (static_cast<int>(state.size()) != state_dim_ ||
      static_cast<int>(action.size()) != action_dim()) {
    throw ShapeError("Q state or action has the wrong length");
  }
  nn::Matrix joined(1, net_.input_dim());
  for (std::size_t i = 0; i < state.size(); ++i) joined(0, i) = state[i];
  for (std::size_t i = 0; i < action.size(); ++i) {
    joined(0, state.size() + i) = action[i];
  }
  return ValueBatch(joined)[0];
}

void SaveQNetwork(const QNetwork& q, const std::string& directory) {
  fs::create_directories(directory);
  io::KeyValueFile manifest;
  manifest.Set("format", "mopp-q-1");
  manifest.Set("role", "q");
  manifest.Set("state_dim", std::to_string(q.state_dim()));
  manifest.Set("action_dim", std::to_string(q.action_dim()));
  manifest.Set("input_mean", io::FormatFloats(std::span<const float>(
                                 q.input_mean().data(), q.input_mean().size())));
  manifest.Set("input_std", io::FormatFloats(std::span<const float>(
                                q.input_std().data(), q.input_std().size())));
  const float scale = q.output_scale();
  manifest.Set("output_scale", io::FormatFloats(std::span<const float>(&scale, 1)));
  manifest.Set("network", "q.mnn");
  nn::SaveNet(q.net(), (fs::path(directory) / "q.mnn").string());
  manifest.Save((fs::path(directory) / "manifest.txt").string());
}

QNetwork LoadQNetwork(const std::string& directory) {
  const fs::path manifest_path = fs::path(directory) / "manifest.txt";
  if (!fs::exists(manifest_path)) {
    throw PathError("no Q manifest at " + manifest_path.string() +
                    " (run train-q first)");
  }
  io::KeyValueFile manifest = io::KeyValueFile::Load(manifest_path.string());
  if (manifest.Require("role") != "q") {
    throw ConfigError(manifest_path.string() + ": role is not q");
  }
  std::vector<int> state_dim = io::ParseInts(manifest.Require("state_dim"));
  std::vector<float> mean = io::ParseFloats(manifest.Require("input_mean"));
  std::vector<float> std = io::ParseFloats(manifest.Require("input_std"));
  std::vector<float> scale = io::ParseFloats(manifest.Require("output_scale"));
  if (state_dim.size() != 1 || scale.size() != 1) {
    throw ConfigError(manifest_path.string() + ": malformed Q manifest");
  }
  fs::path net_path = fs::path(directory) / manifest.Require("network");
  if (!fs::exists(net_path)) throw PathError("missing network file " + net_path.string());
  return QNetwork(nn::LoadNet(net_path.string()), state_dim[0],
                  Eigen::Map<Eigen::VectorXf>(mean.data(), mean.size()),
                  Eigen::Map<Eigen::VectorXf>(std.data(), std.size()),
                  scale[0]);
}

}  // namespace mopp::value
