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

#ifndef MOPP_NN_ADAM_H_
#define MOPP_NN_ADAM_H_

#include <cstdint>

#include "mopp/nn/dense_net.h"

namespace mopp::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
class AdamState {
 public:
  AdamState(const BasicDenseNet<Scalar>& net, AdamOptions options);

  std::int64_t step() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const Parameters<Scalar>& first_moment() const { return first_moment_; }
  const Parameters<Scalar>& second_moment() const { return second_moment_; }

 private:
  template <typename S>
  friend void AdamStep(BasicDenseNet<S>& net, const Parameters<S>& grads,
                       AdamState<S>& state);

  AdamOptions options_;
  std::int64_t step_ = 0;
  Parameters<Scalar> first_moment_;
  Parameters<Scalar> second_moment_;
};

// Bias-corrected adaptive-moment update. Throws ShapeError if the gradient,
// network and accumulator shapes disagree.
template <typename Scalar>
void AdamStep(BasicDenseNet<Scalar>& net, const Parameters<Scalar>& grads,
              AdamState<Scalar>& state);

}  // namespace mopp::nn

#endif  // MOPP_NN_ADAM_H_
