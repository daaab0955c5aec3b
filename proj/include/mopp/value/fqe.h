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

#ifndef MOPP_VALUE_FQE_H_
#define MOPP_VALUE_FQE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mopp/adm/adm_ensemble.h"
#include "mopp/envs/dataset.h"
#include "mopp/rng.h"
#include "mopp/value/q_network.h"

namespace mopp::value {

struct FqeConfig {
  double gamma = 0.99;  // must be < 1
  int iterations = 40;  // outer iterations; the target net is frozen per iteration
  int steps_per_iteration = 500;
  int batch_size = 256;
  double learning_rate = 1e-3;
  std::vector<int> hidden = {500, 500};
  std::uint64_t seed = 0;
};

struct FqeReport {
  // max over training pairs of |Q^k - Q^{k-1}| after each outer iteration
  std::vector<double> max_change;
  int training_pairs = 0;
};

// Fitted Q evaluation of the logging policy. Targets are
// y_i = r_i + gamma * Q^{k-1}(s_{i+1}, a_{i+1}) using the logged next action,
// and y_i = r_i on terminal transitions. Transitions whose episode stops
// without a done flag have no target and are skipped. Throws ConfigError for
// gamma outside [0, 1), DataError when the dataset has no next-action pairs
// and TrainingError on a non-finite loss.
QNetwork FqeTrain(const Dataset& dataset, const FqeConfig& config,
                  FqeReport* report = nullptr);

// Mean of Q(s, a_i) over `samples` actions drawn from one uniformly chosen
// behavior member. Throws ConfigError when samples < 1.
double VEstimate(const QNetwork& q, const adm::AdmEnsemble& behavior,
                 std::span<const float> state, int samples, Rng& rng);

}  // namespace mopp::value

#endif  // MOPP_VALUE_FQE_H_
