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

#include "mopp/adm/adm_ensemble.h"

#include <algorithm>
#include <string>
#include <utility>

#include "mopp/errors.h"

namespace mopp::adm {

std::string_view RoleName(AdmRole role) {
  return role == AdmRole::kBehavior ? "behavior" : "dynamics";
}

AdmRole ParseRole(std::string_view name) {
  if (name == "behavior") return AdmRole::kBehavior;
  if (name == "dynamics") return AdmRole::kDynamics;
  throw ConfigError("unknown ADM role '" + std::string(name) + "'");
}

AdmEnsemble::AdmEnsemble(AdmRole role, std::vector<AdmModel> members)
    : role_(role), members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("an ensemble needs members");
  for (const AdmModel& m : members_) {
    if (m.input_dim() != input_dim() || m.output_dim() != output_dim()) {
      throw ConfigError("ensemble members must share dimensions");
    }
    if (!(m.normalization() == normalization())) {
      throw ConfigError("ensemble members must share normalization stats");
    }
  }
}

const AdmModel& AdmEnsemble::member(int index) const {
  if (index < 0 || index >= size()) {
    throw IndexError("ensemble member " + std::to_string(index) +
                     " out of range [0, " + std::to_string(size()) + ")");
  }
  return members_[index];
}

Eigen::VectorXf AdmEnsemble::Concat(std::span<const float> state,
                                    std::span<const float> action) const {
  if (role_ != AdmRole::kDynamics) {
    throw ConfigError("dynamics query on a behavior ensemble");
  }
  if (static_cast<int>(state.size() + action.size()) != input_dim()) {
    throw ShapeError("state and action do not match the dynamics input");
  }
  Eigen::VectorXf x(input_dim());
  std::copy(state.begin(), state.end(), x.data());
  std::copy(action.begin(), action.end(), x.data() + state.size());
  return x;
}

DynamicsPrediction AdmEnsemble::Step(int member_index,
                                     std::span<const float> state,
                                     std::span<const float> action) const {
  const AdmModel& model = member(member_index);
  Eigen::VectorXf x = Concat(state, action);
  Eigen::VectorXf mode = model.Mode(std::span<const float>(x.data(), x.size()));
  DynamicsPrediction prediction;
  prediction.reward = mode[0];
  prediction.next_state = mode.tail(mode.size() - 1);
  return prediction;
}

double AdmEnsemble::RewardMean(std::span<const float> state,
                               std::span<const float> action) const {
  Eigen::VectorXf x = Concat(state, action);
  BatchPrediction batch = PredictBatch(x.transpose());
  double total = 0.0;
  for (const nn::Matrix& raw : batch.raw) total += raw(0, 0);
  return total / size();
}

double AdmEnsemble::Disc(std::span<const float> state,
                         std::span<const float> action) const {
  if (size() < 2) throw ConfigError("disc requires at least two members");
  Eigen::VectorXf x = Concat(state, action);
  return DiscBatch(PredictBatch(x.transpose()).normalized)[0];
}

AdmEnsemble::BatchPrediction AdmEnsemble::PredictBatch(
    const nn::Matrix& inputs) const {
  BatchPrediction out;
  out.raw.reserve(members_.size());
  out.normalized.reserve(members_.size());
  for (const AdmModel& m : members_) {
    AdmModel::BatchDistribution d = m.DistributionBatch(inputs);
    out.raw.push_back(std::move(d.mean));
    out.normalized.push_back(std::move(d.normalized_mean));
  }
  return out;
}

double MaxPairwiseSquaredDistance(
    std::span<const Eigen::VectorXf> predictions) {
  if (predictions.size() < 2) {
    throw ConfigError("disc requires at least two predictions");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = i + 1; j < predictions.size(); ++j) {
      if (predictions[i].size() != predictions[j].size()) {
        throw ShapeError("disc: prediction lengths differ");
      }
      double total = 0.0;
      for (Eigen::Index d = 0; d < predictions[i].size(); ++d) {
        double diff = static_cast<double>(predictions[i][d]) - predictions[j][d];
        total += diff * diff;
      }
      if (!(total <= best)) best = total;  // NaN propagates
    }
  }
  return best;
}

Eigen::VectorXd DiscBatch(const std::vector<nn::Matrix>& predictions) {
  if (predictions.size() < 2) {
    throw ConfigError("disc requires at least two members");
  }
  const Eigen::Index rows = predictions[0].rows();
  const Eigen::Index cols = predictions[0].cols();
  Eigen::VectorXd disc = Eigen::VectorXd::Zero(rows);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = i + 1; j < predictions.size(); ++j) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        double total = 0.0;
        for (Eigen::Index d = 0; d < cols; ++d) {
          double diff = static_cast<double>(predictions[i](r, d)) -
                        predictions[j](r, d);
          total += diff * diff;
        }
        if (!(total <= disc[r])) disc[r] = total;
      }
    }
  }
  return disc;
}

}  // namespace mopp::adm
