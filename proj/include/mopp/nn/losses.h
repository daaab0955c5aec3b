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

#ifndef MOPP_NN_LOSSES_H_
#define MOPP_NN_LOSSES_H_

#include <Eigen/Core>

#include "mopp/nn/dense_net.h"

namespace mopp::nn {

// Std clamp bounds in normalized units.
inline constexpr double kStdMin = 1e-3;
inline constexpr double kStdMax = 5.0;

// Mean and standard deviation of a diagonal Gaussian.
struct GaussianParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

// Smooth map from an unconstrained network output to a std in
// [kStdMin, kStdMax]: kStdMin + (kStdMax - kStdMin) * sigmoid(pre).
template <typename Scalar>
Scalar StdFromPre(Scalar pre);
template <typename Scalar>
Scalar StdFromPreDerivative(Scalar pre);
// Inverse of StdFromPre; std must lie strictly inside the bounds.
double PreFromStd(double std);

// sum_d [log std_d + (target_d - mean_d)^2 / (2 std_d^2) + log(2 pi) / 2].
// Throws ShapeError on length mismatch and DomainError on std <= 0.
double GaussianNll(const GaussianParams& params, const Eigen::VectorXd& target);

enum class LossKind {
  // per-sample sum_d (output_d - target_d)^2
  kSquaredError,
  // output = [means (d columns), pre-stds (d columns)], target has d columns
  kGaussianNll,
};

struct LossSpec {
  LossKind kind = LossKind::kSquaredError;
  double scale = 1.0;
};

// Mean over the batch rows of the per-sample loss, times spec.scale. When
// d_output is non-null it receives the gradient with respect to `output`.
template <typename Scalar>
double EvaluateLoss(const LossSpec& spec, const MatrixT<Scalar>& output,
                    const MatrixT<Scalar>& target, MatrixT<Scalar>* d_output);

// Gradient of the mean batch loss with respect to every parameter of `net`.
template <typename Scalar>
Parameters<Scalar> Backprop(const BasicDenseNet<Scalar>& net,
                            const LossSpec& spec,
                            const MatrixT<Scalar>& inputs,
                            const MatrixT<Scalar>& targets,
                            double* loss = nullptr);

}  // namespace mopp::nn

#endif  // MOPP_NN_LOSSES_H_
