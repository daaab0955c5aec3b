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

#ifndef MOPP_NN_DENSE_NET_H_
#define MOPP_NN_DENSE_NET_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mopp/rng.h"

namespace mopp::nn {

enum class Activation : std::uint8_t { kRelu = 0, kTanh = 1 };

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixT<float>;
using Vector = VectorT<float>;

template <typename Scalar>
struct DenseLayer {
  MatrixT<Scalar> weight;  // out x in
  VectorT<Scalar> bias;    // out
};

// One entry per layer. Used for weights, gradients and optimizer moments.
template <typename Scalar>
using Parameters = std::vector<DenseLayer<Scalar>>;

// Fully connected network. The activation is applied to hidden layers only;
// the output layer is affine. Batched calls take one sample per row.
template <typename Scalar>
class BasicDenseNet {
 public:
  using MatrixType = MatrixT<Scalar>;
  using VectorType = VectorT<Scalar>;

  // Layer inputs recorded by a forward pass, consumed by Backward.
  struct Cache {
    std::vector<MatrixType> layer_inputs;
  };

  BasicDenseNet() = default;
  // All parameters start at zero; call InitializeGlorot for training.
  BasicDenseNet(std::vector<int> layer_sizes, Activation activation);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  void InitializeGlorot(Rng& rng);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int input_dim() const { return layer_sizes_.front(); }
  int output_dim() const { return layer_sizes_.back(); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  Activation activation() const { return activation_; }
  int ParameterCount() const;

  Parameters<Scalar>& parameters() { return layers_; }
  const Parameters<Scalar>& parameters() const { return layers_; }
  Parameters<Scalar> ZeroParameters() const;

  // Throws ShapeError if x.size() != input_dim().
  VectorType Forward(std::span<const Scalar> x) const;
  MatrixType ForwardBatch(const MatrixType& x) const;
  MatrixType ForwardBatch(const MatrixType& x, Cache* cache) const;

  // Gradients of sum(d_output .* output) with respect to every parameter are
  // written to `grads`; returns the gradient with respect to the input rows.
  MatrixType Backward(const Cache& cache, const MatrixType& d_output,
                      Parameters<Scalar>* grads) const;

  template <typename Other>
  BasicDenseNet<Other> Cast() const {
    BasicDenseNet<Other> out(layer_sizes_, activation_);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      out.parameters()[l].weight = layers_[l].weight.template cast<Other>();
      out.parameters()[l].bias = layers_[l].bias.template cast<Other>();
    }
    return out;
  }

 private:
  void Activate(MatrixType& z) const;
  void CheckInput(Eigen::Index cols) const;

  std::vector<int> layer_sizes_;
  Activation activation_ = Activation::kRelu;
  Parameters<Scalar> layers_;
};

using DenseNet = BasicDenseNet<float>;

template <typename Scalar>
bool SameShape(const Parameters<Scalar>& a, const Parameters<Scalar>& b);

}  // namespace mopp::nn

#endif  // MOPP_NN_DENSE_NET_H_
