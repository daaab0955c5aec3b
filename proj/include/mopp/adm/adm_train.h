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

#ifndef MOPP_ADM_ADM_TRAIN_H_
#define MOPP_ADM_ADM_TRAIN_H_

#include <cstdint>
#include <vector>

#include "mopp/adm/adm_ensemble.h"
#include "mopp/envs/dataset.h"

namespace mopp::adm {

struct AdmTrainConfig {
  AdmArchitecture architecture;
  int ensemble_size = 3;
  int steps = 4000;
  int batch_size = 256;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

// Mean training NLL (normalized units) per member, measured on up to 4096
// evenly spaced training rows before and after optimization.
struct AdmTrainReport {
  std::vector<double> initial_loss;
  std::vector<double> final_loss;
};

// Role-specific training pairs: behavior x = s, o = a; dynamics
// x = (s, a), o = (r, s').
void AdmTrainingData(const Dataset& dataset, AdmRole role, nn::Matrix* inputs,
                     nn::Matrix* outputs);

// Trains every member by minibatch Adam on the teacher-forced NLL. Member k
// draws its ordering and initialization from DeriveSeed(seed, k). Throws
// DataError on empty data and TrainingError when the loss becomes NaN.
AdmEnsemble TrainAdm(const nn::Matrix& inputs, const nn::Matrix& outputs,
                     AdmRole role, const AdmTrainConfig& config,
                     AdmTrainReport* report = nullptr);
AdmEnsemble TrainAdm(const Dataset& dataset, AdmRole role,
                     const AdmTrainConfig& config,
                     AdmTrainReport* report = nullptr);

}  // namespace mopp::adm

#endif  // MOPP_ADM_ADM_TRAIN_H_
