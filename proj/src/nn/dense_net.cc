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

#include "mopp/nn/dense_net.h"

#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "mopp/errors.h"

namespace mopp::nn {

template <typename Scalar>
BasicDenseNet<Scalar>::BasicDenseNet(std::vector<int> layer_sizes,
                                     Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  if (layer_sizes_.size() < 2) {
    throw ConfigError("a dense net needs at least input and output sizes");
  }
  for (int size : layer_sizes_) {
    if (size <= 0) throw ConfigError("layer sizes must be positive");
  }
  layers_.resize(layer_sizes_.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight = MatrixType::Zero(layer_sizes_[l + 1], layer_sizes_[l]);
    layers_[l].bias = VectorType::Zero(layer_sizes_[l + 1]);
  }
}

template <typename Scalar>
void BasicDenseNet<Scalar>::InitializeGlorot(Rng& rng) {
  for (DenseLayer<Scalar>& layer : layers_) {
    double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() +
                                                       layer.weight.cols()));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        layer.weight(r, c) = static_cast<Scalar>(uniform(rng));
      }
    }
    layer.bias.setZero();
  }
}

template <typename Scalar>
int BasicDenseNet<Scalar>::ParameterCount() const {
  int count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    count += layer_sizes_[l] * layer_sizes_[l + 1] + layer_sizes_[l + 1];
  }
  return count;
}

template <typename Scalar>
Parameters<Scalar> BasicDenseNet<Scalar>::ZeroParameters() const {
  Parameters<Scalar> zeros(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    zeros[l].weight = MatrixType::Zero(layers_[l].weight.rows(),
                                       layers_[l].weight.cols());
    zeros[l].bias = VectorType::Zero(layers_[l].bias.size());
  }
  return zeros;
}

template <typename Scalar>
void BasicDenseNet<Scalar>::Activate(MatrixType& z) const {
  if (activation_ == Activation::kRelu) {
    z = z.cwiseMax(Scalar(0));
  } else {
    z = z.array().tanh().matrix();
  }
}

template <typename Scalar>
void BasicDenseNet<Scalar>::CheckInput(Eigen::Index cols) const {
  if (cols != input_dim()) {
    throw ShapeError("dense net expects input dimension " +
                     std::to_string(input_dim()) + ", got " +
                     std::to_string(cols));
  }
}

template <typename Scalar>
typename BasicDenseNet<Scalar>::VectorType BasicDenseNet<Scalar>::Forward(
    std::span<const Scalar> x) const {
  CheckInput(static_cast<Eigen::Index>(x.size()));
  VectorType h = Eigen::Map<const VectorType>(x.data(), x.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    VectorType z = layers_[l].weight * h + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      MatrixType zm = z;
      Activate(zm);
      z = zm;
    }
    h = std::move(z);
  }
  return h;
}

template <typename Scalar>
typename BasicDenseNet<Scalar>::MatrixType BasicDenseNet<Scalar>::ForwardBatch(
    const MatrixType& x) const {
  return ForwardBatch(x, nullptr);
}

template <typename Scalar>
typename BasicDenseNet<Scalar>::MatrixType BasicDenseNet<Scalar>::ForwardBatch(
    const MatrixType& x, Cache* cache) const {
  CheckInput(x.cols());
  if (cache != nullptr) {
    cache->layer_inputs.resize(layers_.size());
    cache->layer_inputs[0] = x;
  }
  MatrixType h;
  const MatrixType* input = &x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    MatrixType z = (*input) * layers_[l].weight.transpose();
    z.rowwise() += layers_[l].bias.transpose();
    if (l + 1 < layers_.size()) {
      Activate(z);
      if (cache != nullptr) cache->layer_inputs[l + 1] = z;
    }
    h = std::move(z);
    input = &h;
  }
  return h;
}

template <typename Scalar>
typename BasicDenseNet<Scalar>::MatrixType BasicDenseNet<Scalar>::Backward(
    const Cache& cache, const MatrixType& d_output,
    Parameters<Scalar>* grads) const {
  if (cache.layer_inputs.size() != layers_.size()) {
    throw ShapeError("forward cache does not match network depth");
  }
  if (d_output.cols() != output_dim() ||
      d_output.rows() != cache.layer_inputs[0].rows()) {
    throw ShapeError("output gradient has wrong shape");
  }
  grads->resize(layers_.size());
  MatrixType delta = d_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const MatrixType& input = cache.layer_inputs[l];
    (*grads)[l].weight.noalias() = delta.transpose() * input;
    (*grads)[l].bias = delta.colwise().sum().transpose();
    MatrixType d_input = delta * layers_[l].weight;
    if (l > 0) {
      // input of layer l is the activated output of layer l - 1
      if (activation_ == Activation::kRelu) {
        d_input = (input.array() > Scalar(0)).select(d_input, Scalar(0));
      } else {
        d_input.array() *= (Scalar(1) - input.array().square());
      }
    }
    delta = std::move(d_input);
  }
  return delta;
}

template <typename Scalar>
bool SameShape(const Parameters<Scalar>& a, const Parameters<Scalar>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l].weight.rows() != b[l].weight.rows() ||
        a[l].weight.cols() != b[l].weight.cols() ||
        a[l].bias.size() != b[l].bias.size()) {
      return false;
    }
  }
  return true;
}

template class BasicDenseNet<float>;
template class BasicDenseNet<double>;
template bool SameShape(const Parameters<float>&, const Parameters<float>&);
template bool SameShape(const Parameters<double>&, const Parameters<double>&);

}  // namespace mopp::nn
