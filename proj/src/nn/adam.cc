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

#include "mopp/nn/adam.h"

#include <cmath>

#include "mopp/errors.h"

namespace mopp::nn {
namespace {

template <typename Block>
void UpdateBlock(Block& param, const Block& grad, Block& m, Block& v,
                 const AdamOptions& opt, double step_size, double bias2) {
  using Scalar = typename Block::Scalar;
  m = Scalar(opt.beta1) * m + Scalar(1.0 - opt.beta1) * grad;
  v = Scalar(opt.beta2) * v + Scalar(1.0 - opt.beta2) * grad.cwiseProduct(grad);
  // step_size already folds in the first-moment bias correction
  param.array() -=
      Scalar(step_size) *
      m.array() / ((v.array() / Scalar(bias2)).sqrt() + Scalar(opt.epsilon));
}

}  // namespace

template <typename Scalar>
AdamState<Scalar>::AdamState(const BasicDenseNet<Scalar>& net,
                             AdamOptions options)
    : options_(options),
      first_moment_(net.ZeroParameters()),
      second_moment_(net.ZeroParameters()) {
  if (!(options_.learning_rate > 0.0) || !(options_.epsilon > 0.0) ||
      !(options_.beta1 > 0.0 && options_.beta1 < 1.0) ||
      !(options_.beta2 > 0.0 && options_.beta2 < 1.0)) {
    throw ConfigError("invalid adam options");
  }
}

template <typename Scalar>
void AdamStep(BasicDenseNet<Scalar>& net, const Parameters<Scalar>& grads,
              AdamState<Scalar>& state) {
  Parameters<Scalar>& params = net.parameters();
  if (!SameShape(params, grads) || !SameShape(params, state.first_moment_)) {
    throw ShapeError("adam: gradient shapes do not match parameters");
  }
  ++state.step_;
  const AdamOptions& opt = state.options_;
  const double t = static_cast<double>(state.step_);
  const double bias1 = 1.0 - std::pow(opt.beta1, t);
  const double bias2 = 1.0 - std::pow(opt.beta2, t);
  const double step_size = opt.learning_rate / bias1;
  for (std::size_t l = 0; l < params.size(); ++l) {
    UpdateBlock(params[l].weight, grads[l].weight,
                state.first_moment_[l].weight, state.second_moment_[l].weight,
                opt, step_size, bias2);
    UpdateBlock(params[l].bias, grads[l].bias, state.first_moment_[l].bias,
                state.second_moment_[l].bias, opt, step_size, bias2);
  }
}

template class AdamState<float>;
template class AdamState<double>;
template void AdamStep(BasicDenseNet<float>&, const Parameters<float>&,
                       AdamState<float>&);
template void AdamStep(BasicDenseNet<double>&, const Parameters<double>&,
                       AdamState<double>&);

}  // namespace mopp::nn
