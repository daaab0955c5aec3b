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

#include "mopp/adm/adm_model.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mopp/errors.h"

namespace mopp::adm {
namespace {

void Activate(nn::Activation activation, nn::Matrix& z) {
  if (activation == nn::Activation::kRelu) {
    z = z.cwiseMax(0.0f);
  } else {
    z = z.array().tanh().matrix();
  }
}

// d (activated) / d (pre-activation), expressed through the activated value
void MaskGradient(nn::Activation activation, const nn::Matrix& activated,
                  nn::Matrix& grad) {
  if (activation == nn::Activation::kRelu) {
    grad = (activated.array() > 0.0f).select(grad, 0.0f);
  } else {
    grad.array() *= (1.0f - activated.array().square());
  }
}

bool IsPermutation(const std::vector<int>& ordering) {
  std::vector<int> sorted = ordering;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i)) return false;
  }
  return true;
}

nn::Matrix RowFromSpan(std::span<const float> values) {
  nn::Matrix row(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) row(0, i) = values[i];
  return row;
}

nn::Matrix Affine(const nn::Matrix& x, const Eigen::VectorXf& mean,
                  const Eigen::VectorXf& std) {
  if (x.cols() != mean.size()) throw ShapeError("normalization width mismatch");
  nn::Matrix out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= std.transpose().array();
  return out;
}

}  // namespace

Normalization Normalization::Identity(int input_dim, int output_dim) {
  return {Eigen::VectorXf::Zero(input_dim), Eigen::VectorXf::Ones(input_dim),
          Eigen::VectorXf::Zero(output_dim), Eigen::VectorXf::Ones(output_dim)};
}

Normalization Normalization::FromData(const nn::Matrix& inputs,
                                      const nn::Matrix& outputs) {
  if (inputs.rows() == 0 || inputs.rows() != outputs.rows()) {
    throw DataError("normalization needs a non-empty, aligned dataset");
  }
  auto column_stats = [](const nn::Matrix& m, Eigen::VectorXf* mean,
                         Eigen::VectorXf* std) {
    Eigen::MatrixXd md = m.cast<double>();
    Eigen::VectorXd mu = md.colwise().mean().transpose();
    Eigen::VectorXd var =
        (md.rowwise() - mu.transpose()).array().square().colwise().mean();
    *mean = mu.cast<float>();
    *std = var.cwiseSqrt().cast<float>().cwiseMax(kMinNormalizationStd);
  };
  Normalization n;
  column_stats(inputs, &n.input_mean, &n.input_std);
  column_stats(outputs, &n.output_mean, &n.output_std);
  return n;
}

nn::Matrix Normalization::NormalizeInputs(const nn::Matrix& x) const {
  return Affine(x, input_mean, input_std);
}

nn::Matrix Normalization::NormalizeOutputs(const nn::Matrix& o) const {
  return Affine(o, output_mean, output_std);
}

bool Normalization::operator==(const Normalization& other) const {
  return input_mean == other.input_mean && input_std == other.input_std &&
         output_mean == other.output_mean && output_std == other.output_std;
}

AdmModel::AdmModel(int input_dim, int output_dim, std::vector<int> ordering,
                   const AdmArchitecture& architecture)
    : ordering_(std::move(ordering)),
      normalization_(Normalization::Identity(input_dim, output_dim)) {
  if (input_dim < 1 || output_dim < 1) {
    throw ConfigError("ADM input and output dimensions must be positive");
  }
  if (static_cast<int>(ordering_.size()) != output_dim ||
      !IsPermutation(ordering_)) {
    throw ConfigError("ADM ordering must be a permutation of the outputs");
  }
  embedding_ = nn::DenseNet({input_dim, architecture.embedding_size},
                            architecture.activation);
  for (int j = 0; j < output_dim; ++j) {
    std::vector<int> sizes = {architecture.embedding_size + j};
    sizes.insert(sizes.end(), architecture.head_hidden.begin(),
                 architecture.head_hidden.end());
    sizes.push_back(2);
    heads_.emplace_back(sizes, architecture.activation);
  }
}

AdmModel::AdmModel(nn::DenseNet embedding, std::vector<nn::DenseNet> heads,
                   std::vector<int> ordering, Normalization normalization)
    : embedding_(std::move(embedding)),
      heads_(std::move(heads)),
      ordering_(std::move(ordering)) {
  if (heads_.size() != ordering_.size() || heads_.empty() ||
      !IsPermutation(ordering_)) {
    throw ConfigError("ADM needs one head per output and a valid ordering");
  }
  for (std::size_t j = 0; j < heads_.size(); ++j) {
    if (heads_[j].input_dim() != embedding_.output_dim() + static_cast<int>(j) ||
        heads_[j].output_dim() != 2 ||
        heads_[j].activation() != embedding_.activation()) {
      throw ShapeError("ADM head " + std::to_string(j) +
                       " does not fit the embedding");
    }
  }
  set_normalization(std::move(normalization));
}

void AdmModel::InitializeWeights(Rng& rng) {
  embedding_.InitializeGlorot(rng);
  for (nn::DenseNet& head : heads_) head.InitializeGlorot(rng);
}

void AdmModel::set_normalization(Normalization normalization) {
  if (normalization.input_mean.size() != input_dim() ||
      normalization.input_std.size() != input_dim() ||
      normalization.output_mean.size() != output_dim() ||
      normalization.output_std.size() != output_dim()) {
    throw ShapeError("normalization does not match the model dimensions");
  }
  if ((normalization.input_std.array() <= 0.0f).any() ||
      (normalization.output_std.array() <= 0.0f).any()) {
    throw DomainError("normalization stds must be positive");
  }
  normalization_ = std::move(normalization);
}

void AdmModel::CheckInput(Eigen::Index cols) const {
  if (cols != input_dim()) {
    throw ShapeError("ADM expects input dimension " +
                     std::to_string(input_dim()) + ", got " +
                     std::to_string(cols));
  }
}

nn::Matrix AdmModel::Embed(const nn::Matrix& x_normalized) const {
  nn::Matrix e = embedding_.ForwardBatch(x_normalized);
  Activate(embedding_.activation(), e);
  return e;
}

nn::GaussianParams AdmModel::GaussianHeadNormalized(
    std::span<const float> x_normalized,
    std::span<const float> prefix_normalized) const {
  CheckInput(static_cast<Eigen::Index>(x_normalized.size()));
  const std::size_t j = prefix_normalized.size();
  if (j >= ordering_.size()) {
    throw ShapeError("ADM prefix must be shorter than the output dimension");
  }
  nn::Matrix e = Embed(RowFromSpan(x_normalized));
  nn::Matrix input(1, e.cols() + static_cast<Eigen::Index>(j));
  input.leftCols(e.cols()) = e;
  for (std::size_t i = 0; i < j; ++i) input(0, e.cols() + i) = prefix_normalized[i];
  nn::Matrix out = heads_[j].ForwardBatch(input);
  nn::GaussianParams params;
  params.mean = Eigen::VectorXd::Constant(1, out(0, 0));
  params.std = Eigen::VectorXd::Constant(1, nn::StdFromPre<float>(out(0, 1)));
  return params;
}

nn::GaussianParams AdmModel::GaussianHead(std::span<const float> x,
                                          std::span<const float> prefix) const {
  CheckInput(static_cast<Eigen::Index>(x.size()));
  if (prefix.size() >= ordering_.size()) {
    throw ShapeError("ADM prefix must be shorter than the output dimension");
  }
  nn::Matrix xn = normalization_.NormalizeInputs(RowFromSpan(x));
  std::vector<float> prefix_n(prefix.size());
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    int dim = ordering_[i];
    prefix_n[i] = (prefix[i] - normalization_.output_mean[dim]) /
                  normalization_.output_std[dim];
  }
  nn::GaussianParams params = GaussianHeadNormalized(
      std::span<const float>(xn.data(), xn.size()), prefix_n);
  int dim = ordering_[prefix.size()];
  double scale = normalization_.output_std[dim];
  params.mean = params.mean * scale +
                Eigen::VectorXd::Constant(1, normalization_.output_mean[dim]);
  params.std *= scale;
  return params;
}

void AdmModel::Propagate(const nn::Matrix& x_normalized,
                         std::span<Rng* const> row_rngs, nn::Matrix* realized,
                         nn::Matrix* means, nn::Matrix* stds) const {
  const Eigen::Index rows = x_normalized.rows();
  const bool sample = !row_rngs.empty();
  if (sample && static_cast<Eigen::Index>(row_rngs.size()) != rows) {
    throw ShapeError("one random stream per row required");
  }
  nn::Matrix e = Embed(x_normalized);
  const Eigen::Index width = e.cols();
  nn::Matrix input(rows, width + output_dim());
  input.leftCols(width) = e;
  realized->resize(rows, output_dim());
  means->resize(rows, output_dim());
  stds->resize(rows, output_dim());
  for (int j = 0; j < output_dim(); ++j) {
    nn::Matrix out = heads_[j].ForwardBatch(input.leftCols(width + j));
    const int dim = ordering_[j];
    for (Eigen::Index r = 0; r < rows; ++r) {
      float mean = out(r, 0);
      float std = nn::StdFromPre<float>(out(r, 1));
      float value = mean;
      if (sample) {
        value = mean + std * static_cast<float>(StandardNormal(*row_rngs[r]));
      }
      (*means)(r, dim) = mean;
      (*stds)(r, dim) = std;
      (*realized)(r, dim) = value;
      input(r, width + j) = value;
    }
  }
}

AdmModel::BatchDistribution AdmModel::DistributionBatch(
    const nn::Matrix& x) const {
  CheckInput(x.cols());
  nn::Matrix realized, means, stds;
  Propagate(normalization_.NormalizeInputs(x), {}, &realized, &means, &stds);
  BatchDistribution out;
  out.normalized_mean = means;
  out.mean = (means.array().rowwise() *
                  normalization_.output_std.transpose().array())
                 .rowwise() +
             normalization_.output_mean.transpose().array();
  out.std = stds.array().rowwise() * normalization_.output_std.transpose().array();
  return out;
}

nn::Matrix AdmModel::SampleBatch(const nn::Matrix& x,
                                 std::span<Rng* const> row_rngs) const {
  CheckInput(x.cols());
  if (static_cast<Eigen::Index>(row_rngs.size()) != x.rows()) {
    throw ShapeError("one random stream per row required");
  }
  nn::Matrix realized, means, stds;
  Propagate(normalization_.NormalizeInputs(x), row_rngs, &realized, &means,
            &stds);
  return (realized.array().rowwise() *
              normalization_.output_std.transpose().array())
             .rowwise() +
         normalization_.output_mean.transpose().array();
}

nn::GaussianParams AdmModel::Distribution(std::span<const float> x) const {
  BatchDistribution batch = DistributionBatch(RowFromSpan(x));
  nn::GaussianParams params;
  params.mean = batch.mean.row(0).transpose().cast<double>();
  params.std = batch.std.row(0).transpose().cast<double>();
  return params;
}

Eigen::VectorXf AdmModel::Mode(std::span<const float> x) const {
  return DistributionBatch(RowFromSpan(x)).mean.row(0).transpose();
}

Eigen::VectorXf AdmModel::Sample(std::span<const float> x, Rng& rng) const {
  Rng* streams[] = {&rng};
  return SampleBatch(RowFromSpan(x), streams).row(0).transpose();
}

double AdmModel::Loss(const nn::Matrix& x_normalized,
                      const nn::Matrix& o_normalized,
                      AdmGradients* grads) const {
  CheckInput(x_normalized.cols());
  if (o_normalized.cols() != output_dim() ||
      o_normalized.rows() != x_normalized.rows()) {
    throw ShapeError("ADM loss: output batch has the wrong shape");
  }
  const Eigen::Index rows = x_normalized.rows();
  nn::DenseNet::Cache embedding_cache;
  nn::Matrix e = embedding_.ForwardBatch(x_normalized, &embedding_cache);
  Activate(embedding_.activation(), e);
  const Eigen::Index width = e.cols();

  nn::Matrix input(rows, width + output_dim());
  input.leftCols(width) = e;
  for (int j = 0; j < output_dim(); ++j) {
    input.col(width + j) = o_normalized.col(ordering_[j]);
  }

  nn::Matrix d_embedding;
  if (grads != nullptr) {
    d_embedding = nn::Matrix::Zero(rows, width);
    grads->heads.resize(heads_.size());
  }
  const nn::LossSpec spec{nn::LossKind::kGaussianNll, 1.0};
  double total = 0.0;
  for (int j = 0; j < output_dim(); ++j) {
    nn::DenseNet::Cache cache;
    nn::Matrix out = heads_[j].ForwardBatch(input.leftCols(width + j),
                                            grads ? &cache : nullptr);
    nn::Matrix target = o_normalized.col(ordering_[j]);
    nn::Matrix d_out;
    total += nn::EvaluateLoss<float>(spec, out, target,
                                     grads ? &d_out : nullptr);
    if (grads != nullptr) {
      nn::Matrix d_input = heads_[j].Backward(cache, d_out, &grads->heads[j]);
      d_embedding += d_input.leftCols(width);
    }
  }
  if (grads != nullptr) {
    MaskGradient(embedding_.activation(), e, d_embedding);
    embedding_.Backward(embedding_cache, d_embedding, &grads->embedding);
  }
  return total;
}

}  // namespace mopp::adm
