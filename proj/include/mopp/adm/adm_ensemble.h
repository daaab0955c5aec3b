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

#ifndef MOPP_ADM_ADM_ENSEMBLE_H_
#define MOPP_ADM_ADM_ENSEMBLE_H_

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mopp/adm/adm_model.h"

namespace mopp::adm {

// behavior: s -> a.  dynamics: (s, a) -> (r, s') with the reward first.
enum class AdmRole { kBehavior, kDynamics };

std::string_view RoleName(AdmRole role);
// Throws ConfigError on unknown names.
AdmRole ParseRole(std::string_view name);

struct DynamicsPrediction {
  double reward = 0.0;
  Eigen::VectorXf next_state;
};

// K ADMs with independently drawn orderings and shared normalization.
class AdmEnsemble {
 public:
  // Per-member mode predictions for a batch of inputs.
  struct BatchPrediction {
    std::vector<nn::Matrix> raw;
    std::vector<nn::Matrix> normalized;
  };

  // Throws ConfigError when empty or when members disagree on dimensions or
  // normalization.
  AdmEnsemble(AdmRole role, std::vector<AdmModel> members);

  AdmRole role() const { return role_; }
  int size() const { return static_cast<int>(members_.size()); }
  int input_dim() const { return members_.front().input_dim(); }
  int output_dim() const { return members_.front().output_dim(); }
  const AdmModel& member(int index) const;  // throws IndexError
  const std::vector<AdmModel>& members() const { return members_; }
  const Normalization& normalization() const {
    return members_.front().normalization();
  }

  // Dynamics role only: mode prediction of one member split into (r, s').
  DynamicsPrediction Step(int member_index, std::span<const float> state,
                          std::span<const float> action) const;
  // Average of the members' mode reward predictions.
  double RewardMean(std::span<const float> state,
                    std::span<const float> action) const;
  // max_{i,j} |f^i(s, a) - f^j(s, a)|^2 on normalized mode predictions.
  // Throws ConfigError when the ensemble has fewer than two members.
  double Disc(std::span<const float> state, std::span<const float> action) const;

  BatchPrediction PredictBatch(const nn::Matrix& inputs) const;

 private:
  Eigen::VectorXf Concat(std::span<const float> state,
                         std::span<const float> action) const;

  AdmRole role_;
  std::vector<AdmModel> members_;
};

// Maximum squared Euclidean distance over all pairs of prediction vectors,
// accumulated in double in index order. Throws ConfigError for < 2 vectors.
double MaxPairwiseSquaredDistance(std::span<const Eigen::VectorXf> predictions);

// Row-wise MaxPairwiseSquaredDistance over per-member prediction matrices.
Eigen::VectorXd DiscBatch(const std::vector<nn::Matrix>& predictions);

}  // namespace mopp::adm

#endif  // MOPP_ADM_ADM_ENSEMBLE_H_
