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

#ifndef MOPP_VALUE_Q_NETWORK_H_
#define MOPP_VALUE_Q_NETWORK_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mopp/nn/dense_net.h"

namespace mopp::value {

// Q(s, a) = output_scale * net((concat(s, a) - input_mean) / input_std).
class QNetwork {
 public:
  QNetwork(int state_dim, int action_dim, const std::vector<int>& hidden,
           nn::Activation activation = nn::Activation::kRelu);
  // Throws ShapeError if the net does not map state_dim + action_dim to 1.
  QNetwork(nn::DenseNet net, int state_dim, Eigen::VectorXf input_mean,
           Eigen::VectorXf input_std, float output_scale);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return net_.input_dim() - state_dim_; }

  nn::DenseNet& net() { return net_; }
  const nn::DenseNet& net() const { return net_; }
  const Eigen::VectorXf& input_mean() const { return input_mean_; }
  const Eigen::VectorXf& input_std() const { return input_std_; }
  float output_scale() const { return output_scale_; }
  void set_input_normalization(Eigen::VectorXf mean, Eigen::VectorXf std);
  void set_output_scale(float scale);

  double Value(std::span<const float> state, std::span<const float> action) const;
  // One row per (s, a) pair.
  Eigen::VectorXf ValueBatch(const nn::Matrix& states,
                             const nn::Matrix& actions) const;
  Eigen::VectorXf ValueBatch(const nn::Matrix& state_actions) const;
  // Network output before scaling.
  Eigen::VectorXf NormalizedValueBatch(const nn::Matrix& state_actions) const;
  nn::Matrix NormalizeInputs(const nn::Matrix& state_actions) const;

 private:
  nn::DenseNet net_;
  int state_dim_;
  Eigen::VectorXf input_mean_;
  Eigen::VectorXf input_std_;
  float output_scale_ = 1.0f;
};

// `directory`/manifest.txt (role = q, dims, normalization, output scale) plus
// `directory`/q.mnn.
void SaveQNetwork(const QNetwork& q, const std::string& directory);
QNetwork LoadQNetwork(const std::string& directory);

}  // namespace mopp::value

#endif  // MOPP_VALUE_Q_NETWORK_H_
