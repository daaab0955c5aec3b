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

#include "mopp/adm/adm_train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mopp/errors.h"
#include "mopp/nn/adam.h"
#include "mopp/rng.h"

namespace mopp::adm {
namespace {

constexpr int kReportRows = 4096;

std::vector<int> EvenlySpacedRows(int total, int count) {
  std::vector<int> rows;
  int n = std::min(total, count);
  for (int i = 0; i < n; ++i) {
    rows.push_back(static_cast<int>(static_cast<long long>(i) * total / n));
  }
  return rows;
}

void TrainMember(AdmModel& model, const nn::Matrix& xn, const nn::Matrix& on,
                 const AdmTrainConfig& config, Rng& rng) {
  nn::AdamOptions options;
  options.learning_rate = config.learning_rate;
  nn::AdamState<float> embedding_state(model.embedding(), options);
  std::vector<nn::AdamState<float>> head_states;
  for (const nn::DenseNet& head : model.heads()) head_states.emplace_back(head, options);

  const int rows = static_cast<int>(xn.rows());
  const int batch = std::min(config.batch_size, rows);
  std::uniform_int_distribution<int> pick(0, rows - 1);
  std::vector<int> index(batch);
  AdmGradients grads;
  for (int step = 0; step < config.steps; ++step) {
    for (int& i : index) i = pick(rng);
    nn::Matrix xb = xn(index, Eigen::all);
    nn::Matrix ob = on(index, Eigen::all);
    double loss = model.Loss(xb, ob, &grads);
    if (!std::isfinite(loss)) {
      throw TrainingError("ADM training diverged (non-finite loss)", step);
    }
    nn::AdamStep(model.embedding(), grads.embedding, embedding_state);
    for (std::size_t j = 0; j < model.heads().size(); ++j) {
      nn::AdamStep(model.heads()[j], grads.heads[j], head_states[j]);
    }
  }
}

}  // namespace

void AdmTrainingData(const Dataset& dataset, AdmRole role, nn::Matrix* inputs,
                     nn::Matrix* outputs) {
  const int n = dataset.size();
  const int s = dataset.state_dim();
  const int a = dataset.action_dim();
  if (role == AdmRole::kBehavior) {
    *inputs = dataset.states();
    *outputs = dataset.actions();
    return;
  }
  inputs->resize(n, s + a);
  inputs->leftCols(s) = dataset.states();
  inputs->rightCols(a) = dataset.actions();
  outputs->resize(n, 1 + s);
  for (int i = 0; i < n; ++i) (*outputs)(i, 0) = dataset.reward(i);
  outputs->rightCols(s) = dataset.next_states();
}

AdmEnsemble TrainAdm(const nn::Matrix& inputs, const nn::Matrix& outputs,
                     AdmRole role, const AdmTrainConfig& config,
                     AdmTrainReport* report) {
  if (inputs.rows() == 0) throw DataError("cannot train an ADM on no data");
  if (inputs.rows() != outputs.rows()) {
    throw ShapeError("ADM inputs and outputs have different row counts");
  }
  if (config.ensemble_size < 1 || config.steps < 0 || config.batch_size < 1) {
    throw ConfigError("invalid ADM training configuration");
  }
  Normalization normalization = Normalization::FromData(inputs, outputs);
  const nn::Matrix xn = normalization.NormalizeInputs(inputs);
  const nn::Matrix on = normalization.NormalizeOutputs(outputs);
  const std::vector<int> report_rows =
      EvenlySpacedRows(static_cast<int>(inputs.rows()), kReportRows);
  const nn::Matrix x_report = xn(report_rows, Eigen::all);
  const nn::Matrix o_report = on(report_rows, Eigen::all);

  std::vector<AdmModel> members;
  for (int k = 0; k < config.ensemble_size; ++k) {
    Rng rng(DeriveSeed(config.seed, static_cast<std::uint64_t>(k)));
    std::vector<int> ordering(outputs.cols());
    std::iota(ordering.begin(), ordering.end(), 0);
    std::shuffle(ordering.begin(), ordering.end(), rng);
    AdmModel model(static_cast<int>(inputs.cols()),
                   static_cast<int>(outputs.cols()), ordering,
                   config.architecture);
    model.InitializeWeights(rng);
    model.set_normalization(normalization);
    if (report != nullptr) {
      report->initial_loss.push_back(model.Loss(x_report, o_report, nullptr));
    }
    TrainMember(model, xn, on, config, rng);
    if (report != nullptr) {
      report->final_loss.push_back(model.Loss(x_report, o_report, nullptr));
    }
    members.push_back(std::move(model));
  }
  return AdmEnsemble(role, std::move(members));
}

AdmEnsemble TrainAdm(const Dataset& dataset, AdmRole role,
                     const AdmTrainConfig& config, AdmTrainReport* report) {
  if (dataset.empty()) throw DataError("cannot train an ADM on an empty dataset");
  nn::Matrix inputs, outputs;
  AdmTrainingData(dataset, role, &inputs, &outputs);
  return TrainAdm(inputs, outputs, role, config, report);
}

}  // namespace mopp::adm
