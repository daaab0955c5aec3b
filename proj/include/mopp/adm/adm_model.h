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

#ifndef MOPP_ADM_ADM_MODEL_H_
#define MOPP_ADM_ADM_MODEL_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mopp/nn/dense_net.h"
#include "mopp/nn/losses.h"
#include "mopp/rng.h"

namespace mopp::adm {

inline constexpr float kMinNormalizationStd = 1e-6f;

struct AdmArchitecture {
  int embedding_size = 500;
  std::vector<int> head_hidden = {200, 100};
  nn::Activation activation = nn::Activation::kRelu;
};

// Per-dimension affine normalization of model inputs and outputs.
struct Normalization {
  Eigen::VectorXf input_mean, input_std;
  Eigen::VectorXf output_mean, output_std;

  static Normalization Identity(int input_dim, int output_dim);
  // Population mean/std per column, std floored at kMinNormalizationStd.
  static Normalization FromData(const nn::Matrix& inputs,
                                const nn::Matrix& outputs);

  nn::Matrix NormalizeInputs(const nn::Matrix& x) const;
  nn::Matrix NormalizeOutputs(const nn::Matrix& o) const;

  bool operator==(const Normalization& other) const;
};

struct AdmGradients {
  nn::Parameters<float> embedding;
  std::vector<nn::Parameters<float>> heads;
};

// Autoregressive conditional Gaussian model
//   p(o | x) = prod_j p(o_{ordering[j]} | x, o_{ordering[0..j-1]}).
// An embedding layer maps the normalized input to `embedding_size` activated
// features; head j takes (embedding, normalized realized prefix of length j)
// and emits (mean, pre-std) for output dimension ordering[j].
class AdmModel {
 public:
  // Batched results; columns indexed by output dimension.
  struct BatchDistribution {
    nn::Matrix mean;             // original units
    nn::Matrix std;              // original units
    nn::Matrix normalized_mean;  // normalized units
  };

  AdmModel(int input_dim, int output_dim, std::vector<int> ordering,
           const AdmArchitecture& architecture);
  // Validates that the nets fit together and that ordering is a permutation.
  AdmModel(nn::DenseNet embedding, std::vector<nn::DenseNet> heads,
           std::vector<int> ordering, Normalization normalization);

  void InitializeWeights(Rng& rng);

  int input_dim() const { return embedding_.input_dim(); }
  int output_dim() const { return static_cast<int>(ordering_.size()); }
  int embedding_size() const { return embedding_.output_dim(); }
  const std::vector<int>& ordering() const { return ordering_; }

  const Normalization& normalization() const { return normalization_; }
  void set_normalization(Normalization normalization);

  nn::DenseNet& embedding() { return embedding_; }
  const nn::DenseNet& embedding() const { return embedding_; }
  // heads()[j] predicts output dimension ordering()[j]
  std::vector<nn::DenseNet>& heads() { return heads_; }
  const std::vector<nn::DenseNet>& heads() const { return heads_; }

  // Gaussian of output dimension ordering()[prefix.size()] given x and the
  // already realized values of the preceding dimensions in ordering order.
  // Inputs and result in original units. Throws ShapeError when the prefix
  // is as long as the output.
  nn::GaussianParams GaussianHead(std::span<const float> x,
                                  std::span<const float> prefix) const;
  nn::GaussianParams GaussianHeadNormalized(
      std::span<const float> x_normalized,
      std::span<const float> prefix_normalized) const;

  // Per-dimension means and stds obtained by conditioning every head on the
  // means of the preceding dimensions. Indexed by output dimension.
  nn::GaussianParams Distribution(std::span<const float> x) const;
  Eigen::VectorXf Mode(std::span<const float> x) const;
  Eigen::VectorXf Sample(std::span<const float> x, Rng& rng) const;

  BatchDistribution DistributionBatch(const nn::Matrix& x) const;
  // Autoregressive sampling; row r draws from *row_rngs[r].
  nn::Matrix SampleBatch(const nn::Matrix& x,
                         std::span<Rng* const> row_rngs) const;

  // Teacher-forced mean over rows of sum_j NLL(head j), normalized units.
  // Fills `grads` when non-null.
  double Loss(const nn::Matrix& x_normalized, const nn::Matrix& o_normalized,
              AdmGradients* grads) const;

 private:
  nn::Matrix Embed(const nn::Matrix& x_normalized) const;
  // Runs the chain on normalized inputs. Realized values are the means when
  // row_rngs is empty, otherwise samples. Outputs indexed by output dim.
  void Propagate(const nn::Matrix& x_normalized, std::span<Rng* const> row_rngs,
                 nn::Matrix* realized, nn::Matrix* means,
                 nn::Matrix* stds) const;
  void CheckInput(Eigen::Index cols) const;

  nn::DenseNet embedding_;
  std::vector<nn::DenseNet> heads_;
  std::vector<int> ordering_;
  Normalization normalization_;
};

}  // namespace mopp::adm

#endif  // MOPP_ADM_ADM_MODEL_H_
