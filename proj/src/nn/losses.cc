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

#include "mopp/nn/losses.h"

#include <algorithm>
#include <cmath>

#include "mopp/errors.h"

namespace mopp::nn {
namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // log(2 pi) / 2

template <typename Scalar>
Scalar Sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

}  // namespace

template <typename Scalar>
Scalar StdFromPre(Scalar pre) {
  Scalar std = Scalar(kStdMin) + Scalar(kStdMax - kStdMin) * Sigmoid(pre);
  return std::clamp(std, Scalar(kStdMin), Scalar(kStdMax));
}

template <typename Scalar>
Scalar StdFromPreDerivative(Scalar pre) {
  Scalar s = Sigmoid(pre);
  return Scalar(kStdMax - kStdMin) * s * (Scalar(1) - s);
}

double PreFromStd(double std) {
  if (!(std > kStdMin && std < kStdMax)) {
    throw DomainError("std outside the open clamp interval");
  }
  double p = (std - kStdMin) / (kStdMax - kStdMin);
  return std::log(p / (1.0 - p));
}

double GaussianNll(const GaussianParams& params, const Eigen::VectorXd& target) {
  if (params.mean.size() != params.std.size() ||
      params.mean.size() != target.size()) {
    throw ShapeError("gaussian_nll: mean, std and target lengths differ");
  }
  double total = 0.0;
  for (Eigen::Index d = 0; d < target.size(); ++d) {
    double sigma = params.std[d];
    if (!(sigma > 0.0)) throw DomainError("gaussian_nll: std must be positive");
    double residual = target[d] - params.mean[d];
    total += std::log(sigma) + residual * residual / (2.0 * sigma * sigma) +
             kHalfLogTwoPi;
  }
  return total;
}

template <typename Scalar>
double EvaluateLoss(const LossSpec& spec, const MatrixT<Scalar>& output,
                    const MatrixT<Scalar>& target, MatrixT<Scalar>* d_output) {
  const Eigen::Index batch = output.rows();
  if (target.rows() != batch || batch == 0) {
    throw ShapeError("loss: output and target batch sizes differ");
  }
  const double per_sample = spec.scale / static_cast<double>(batch);
  double total = 0.0;

  if (spec.kind == LossKind::kSquaredError) {
    if (output.cols() != target.cols()) {
      throw ShapeError("squared error: output and target widths differ");
    }
    MatrixT<Scalar> residual = output - target;
    for (Eigen::Index c = 0; c < residual.cols(); ++c) {
      for (Eigen::Index r = 0; r < batch; ++r) {
        double e = residual(r, c);
        total += e * e;
      }
    }
    if (d_output != nullptr) {
      *d_output = residual * static_cast<Scalar>(2.0 * per_sample);
    }
    return total * per_sample;
  }

  const Eigen::Index dims = target.cols();
  if (output.cols() != 2 * dims) {
    throw ShapeError("gaussian nll: output must hold a mean and pre-std per "
                     "target dimension");
  }
  if (d_output != nullptr) d_output->resize(batch, 2 * dims);
  for (Eigen::Index d = 0; d < dims; ++d) {
    for (Eigen::Index r = 0; r < batch; ++r) {
      double mean = output(r, d);
      double pre = output(r, dims + d);
      double sigma = StdFromPre<double>(pre);
      double residual = static_cast<double>(target(r, d)) - mean;
      double inv_var = 1.0 / (sigma * sigma);
      total += std::log(sigma) + 0.5 * residual * residual * inv_var +
               kHalfLogTwoPi;
      if (d_output != nullptr) {
        double d_mean = -residual * inv_var;
        double d_sigma = 1.0 / sigma - residual * residual * inv_var / sigma;
        (*d_output)(r, d) = static_cast<Scalar>(per_sample * d_mean);
        (*d_output)(r, dims + d) = static_cast<Scalar>(
            per_sample * d_sigma * StdFromPreDerivative<double>(pre));
      }
    }
  }
  return total * per_sample;
}

template <typename Scalar>
Parameters<Scalar> Backprop(const BasicDenseNet<Scalar>& net,
                            const LossSpec& spec,
                            const MatrixT<Scalar>& inputs,
                            const MatrixT<Scalar>& targets, double* loss) {
  typename BasicDenseNet<Scalar>::Cache cache;
  MatrixT<Scalar> output = net.ForwardBatch(inputs, &cache);
  MatrixT<Scalar> d_output;
  double value = EvaluateLoss(spec, output, targets, &d_output);
  if (loss != nullptr) *loss = value;
  Parameters<Scalar> grads;
  net.Backward(cache, d_output, &grads);
  return grads;
}

template float StdFromPre(float);
template double StdFromPre(double);
template float StdFromPreDerivative(float);
template double StdFromPreDerivative(double);
template double EvaluateLoss(const LossSpec&, const MatrixT<float>&,
                             const MatrixT<float>&, MatrixT<float>*);
template double EvaluateLoss(const LossSpec&, const MatrixT<double>&,
                             const MatrixT<double>&, MatrixT<double>*);
template Parameters<float> Backprop(const BasicDenseNet<float>&,
                                    const LossSpec&, const MatrixT<float>&,
                                    const MatrixT<float>&, double*);
template Parameters<double> Backprop(const BasicDenseNet<double>&,
                                     const LossSpec&, const MatrixT<double>&,
                                     const MatrixT<double>&, double*);

}  // namespace mopp::nn
