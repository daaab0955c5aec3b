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

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mopp/errors.h"
#include "mopp/nn/adam.h"
#include "mopp/nn/checkpoint.h"
#include "mopp/nn/dense_net.h"
#include "mopp/nn/losses.h"
#include "mopp/rng.h"

namespace mopp::nn {
namespace {

using DenseNetD = BasicDenseNet<double>;
using MatrixD = MatrixT<double>;

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

TEST(DenseNetTest, IdentityLayer) {
  DenseNet net({2, 2}, Activation::kRelu);
  net.parameters()[0].weight.setIdentity();
  const std::vector<float> x = {1.5f, -2.0f};
  const Vector y = net.Forward(x);
  EXPECT_EQ(y[0], 1.5f);
  EXPECT_EQ(y[1], -2.0f);
}

TEST(DenseNetTest, ConstantLayer) {
  DenseNet net({3, 1}, Activation::kTanh);
  net.parameters()[0].bias << 3.0f;
  const std::vector<float> x = {0.3f, -7.0f, 2.0f};
  EXPECT_EQ(net.Forward(x)[0], 3.0f);
}

TEST(DenseNetTest, TwoLayerReluMatchesHandComputation) {
  DenseNetD net({1, 3, 1}, Activation::kRelu);
  const double w1[3] = {1.0, -2.0, 0.5};
  const double b1[3] = {0.5, 3.0, -0.25};
  const double w2[3] = {1.0, 2.0, -3.0};
  const double b2 = 0.25;
  for (int i = 0; i < 3; ++i) {
    net.parameters()[0].weight(i, 0) = w1[i];
    net.parameters()[0].bias[i] = b1[i];
    net.parameters()[1].weight(0, i) = w2[i];
  }
  net.parameters()[1].bias[0] = b2;

  const double x = 1.0;
  double expected = b2;
  for (int i = 0; i < 3; ++i) {
    const double pre = w1[i] * x + b1[i];
    expected += w2[i] * (pre > 0.0 ? pre : 0.0);
  }
  const std::vector<double> input = {x};
  EXPECT_DOUBLE_EQ(net.Forward(input)[0], expected);
  EXPECT_DOUBLE_EQ(net.Forward(input)[0], 3.0);
}

TEST(DenseNetTest, RejectsWrongInputDimension) {
  DenseNet net({2, 4, 1}, Activation::kRelu);
  const std::vector<float> x = {1.0f, 2.0f, 3.0f};
  EXPECT_THROW(net.Forward(x), ShapeError);
  EXPECT_THROW(net.ForwardBatch(Matrix::Zero(5, 3)), ShapeError);
}

TEST(DenseNetTest, ParameterCountAndOutputShape) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> sizes;
    const int layers = 2 + UniformIndex(rng, 4);
    for (int l = 0; l < layers; ++l) sizes.push_back(1 + UniformIndex(rng, 9));
    DenseNet net(sizes, trial % 2 ? Activation::kTanh : Activation::kRelu);
    net.InitializeGlorot(rng);
    int expected = 0;
    for (int l = 0; l + 1 < layers; ++l) expected += sizes[l] * sizes[l + 1] + sizes[l + 1];
    EXPECT_EQ(net.ParameterCount(), expected);
    const Matrix x = Matrix::Random(4, sizes.front());
    const Matrix y = net.ForwardBatch(x);
    EXPECT_EQ(y.rows(), 4);
    EXPECT_EQ(y.cols(), sizes.back());
  }
}

TEST(DenseNetTest, GlorotBoundsAndZeroBias) {
  Rng rng(11);
  DenseNet net({6, 10, 2}, Activation::kRelu);
  net.InitializeGlorot(rng);
  const float bound0 = std::sqrt(6.0f / 16.0f);
  EXPECT_LE(net.parameters()[0].weight.cwiseAbs().maxCoeff(), bound0);
  EXPECT_TRUE(net.parameters()[0].bias.isZero());
  EXPECT_TRUE(net.parameters()[1].bias.isZero());
}

TEST(DenseNetTest, ForwardIsDeterministic) {
  Rng rng(5);
  DenseNet net({4, 16, 16, 3}, Activation::kTanh);
  net.InitializeGlorot(rng);
  Matrix x(7, 4);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = StandardNormal(rng);
  const Matrix a = net.ForwardBatch(x);
  const Matrix b = net.ForwardBatch(x);
  EXPECT_EQ(a, b);
  const std::vector<float> row = {x(2, 0), x(2, 1), x(2, 2), x(2, 3)};
  const Vector single = net.Forward(row);
  // Batched and single-row products sum in different orders.
  for (int d = 0; d < 3; ++d) {
    EXPECT_NEAR(single[d], a(2, d), 1e-5 * (1.0 + std::abs(a(2, d))));
  }
}

TEST(GaussianNllTest, ZeroResidual) {
  GaussianParams p{Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Ones(1)};
  EXPECT_NEAR(GaussianNll(p, Eigen::VectorXd::Constant(1, 0.7)), kHalfLog2Pi, 1e-12);
  EXPECT_NEAR(kHalfLog2Pi, 0.9189, 1e-4);
}

TEST(GaussianNllTest, QuadraticTerm) {
  GaussianParams p{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
  EXPECT_NEAR(GaussianNll(p, Eigen::VectorXd::Constant(1, 2.0)), 2.0 + kHalfLog2Pi,
              1e-12);
}

TEST(GaussianNllTest, MatchesClosedFormDensity) {
  GaussianParams p{Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.5, 2.0)};
  const Eigen::Vector2d target(0.0, 3.0);
  double oracle = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double z = (target[d] - p.mean[d]) / p.std[d];
    const double density =
        std::exp(-0.5 * z * z) / (p.std[d] * std::sqrt(2.0 * std::numbers::pi));
    oracle -= std::log(density);
  }
  EXPECT_NEAR(GaussianNll(p, target), oracle, 1e-12);
  EXPECT_NEAR(GaussianNll(p, target), 4.337877066409345, 1e-12);
}

TEST(GaussianNllTest, Errors) {
  GaussianParams p{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0)};
  EXPECT_THROW(GaussianNll(p, Eigen::Vector2d::Zero()), DomainError);
  p.std << 1.0, -1.0;
  EXPECT_THROW(GaussianNll(p, Eigen::Vector2d::Zero()), DomainError);
  p.std << 1.0, 1.0;
  EXPECT_THROW(GaussianNll(p, Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST(GaussianNllTest, LowerBoundProperty) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> s(kStdMin, kStdMax);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + UniformIndex(rng, 5);
    GaussianParams p{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    Eigen::VectorXd target(d);
    double bound = 0.0;
    for (int i = 0; i < d; ++i) {
      p.mean[i] = u(rng);
      p.std[i] = s(rng);
      target[i] = u(rng);
      bound += std::log(p.std[i]) + kHalfLog2Pi;
    }
    EXPECT_GE(GaussianNll(p, target), bound);
    EXPECT_NEAR(GaussianNll(p, p.mean), bound, 1e-12);
  }
}

TEST(StdMapTest, StaysWithinClampBounds) {
  for (double pre = -60.0; pre <= 60.0; pre += 0.5) {
    const double s = StdFromPre(pre);
    EXPECT_GE(s, kStdMin);
    EXPECT_LE(s, kStdMax);
  }
  for (double s : {0.01, 0.5, 1.0, 4.0}) EXPECT_NEAR(StdFromPre(PreFromStd(s)), s, 1e-9);
}

TEST(AdamTest, ZeroGradientIsFixedPoint) {
  Rng rng(1);
  DenseNet net({3, 5, 2}, Activation::kRelu);
  net.InitializeGlorot(rng);
  const DenseNet before = net;
  AdamState<float> state(net, AdamOptions{});
  for (int i = 0; i < 5; ++i) AdamStep(net, net.ZeroParameters(), state);
  EXPECT_EQ(state.step(), 5);
  for (int l = 0; l < net.num_layers(); ++l) {
    EXPECT_EQ(net.parameters()[l].weight, before.parameters()[l].weight);
    EXPECT_EQ(net.parameters()[l].bias, before.parameters()[l].bias);
  }
}

TEST(AdamTest, OneStepMatchesHandRolledUpdate) {
  DenseNetD net({1, 1}, Activation::kRelu);
  net.parameters()[0].weight(0, 0) = 0.3;
  AdamOptions options;
  AdamState<double> state(net, options);
  Parameters<double> grads = net.ZeroParameters();
  grads[0].weight(0, 0) = 1.0;
  AdamStep(net, grads, state);

  const double m = (1.0 - options.beta1) * 1.0;
  const double v = (1.0 - options.beta2) * 1.0;
  const double m_hat = m / (1.0 - options.beta1);
  const double v_hat = v / (1.0 - options.beta2);
  const double expected = 0.3 - options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
  EXPECT_NEAR(net.parameters()[0].weight(0, 0), expected, 1e-15);
  EXPECT_NEAR(0.3 - net.parameters()[0].weight(0, 0), options.learning_rate, 1e-8);
  EXPECT_EQ(state.step(), 1);
  EXPECT_EQ(state.first_moment()[0].weight.rows(), 1);
}

TEST(AdamTest, RegressionLossIsMonotone) {
  Rng rng(2);
  DenseNetD net({3, 1}, Activation::kRelu);
  net.InitializeGlorot(rng);
  MatrixD x = MatrixD::Random(64, 3);
  const Eigen::Vector3d w(0.5, -1.0, 2.0);
  MatrixD y = x * w;
  y.array() += 0.3;
  AdamOptions options;
  options.learning_rate = 1e-2;
  AdamState<double> state(net, options);
  const LossSpec spec{LossKind::kSquaredError, 1.0};
  double previous = 0.0;
  for (int step = 0; step < 100; ++step) {
    double loss = 0.0;
    const Parameters<double> grads = Backprop(net, spec, x, y, &loss);
    if (step > 0) EXPECT_LE(loss, previous + 1e-12) << "step " << step;
    previous = loss;
    AdamStep(net, grads, state);
  }
}

TEST(AdamTest, RejectsMismatchedGradients) {
  DenseNet net({2, 3, 1}, Activation::kRelu);
  DenseNet other({2, 4, 1}, Activation::kRelu);
  AdamState<float> state(net, AdamOptions{});
  EXPECT_THROW(AdamStep(net, other.ZeroParameters(), state), ShapeError);
}

TEST(BackpropTest, ZeroGradientAtMinimum) {
  Rng rng(4);
  DenseNet net({2, 4, 1}, Activation::kTanh);
  net.InitializeGlorot(rng);
  const Matrix x = Matrix::Random(8, 2);
  const Matrix y = net.ForwardBatch(x);
  const Parameters<float> grads =
      Backprop(net, LossSpec{LossKind::kSquaredError, 1.0}, x, y);
  for (const auto& layer : grads) {
    EXPECT_TRUE(layer.weight.isZero());
    EXPECT_TRUE(layer.bias.isZero());
  }
}

// Central finite differences against the analytic gradient; returns the
// largest relative error.
double GradientCheck(DenseNetD& net, const LossSpec& spec, const MatrixD& x,
                     const MatrixD& y) {
  const Parameters<double> analytic = Backprop(net, spec, x, y);
  const double h = 1e-5;
  double worst = 0.0;
  auto loss_at = [&] {
    return EvaluateLoss<double>(spec, net.ForwardBatch(x), y, nullptr);
  };
  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = loss_at();
    param = saved - h;
    const double down = loss_at();
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(grad), 1e-6});
    worst = std::max(worst, std::abs(numeric - grad) / scale);
  };
  for (int l = 0; l < net.num_layers(); ++l) {
    auto& layer = net.parameters()[l];
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      check(layer.weight.data()[i], analytic[l].weight.data()[i]);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      check(layer.bias.data()[i], analytic[l].bias.data()[i]);
    }
  }
  return worst;
}

TEST(BackpropTest, MatchesFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const bool nll = trial % 2 == 1;
    const int in = 1 + UniformIndex(rng, 4);
    const int hidden = 2 + UniformIndex(rng, 8);
    const int out = 1 + UniformIndex(rng, 3);
    DenseNetD net({in, hidden, nll ? 2 * out : out},
                  trial % 4 < 2 ? Activation::kTanh : Activation::kRelu);
    net.InitializeGlorot(rng);
    ASSERT_LE(net.ParameterCount(), 200);
    for (auto& layer : net.parameters()) layer.bias.setRandom();
    const MatrixD x = MatrixD::Random(6, in);
    const MatrixD y = MatrixD::Random(6, out);
    const LossSpec spec{nll ? LossKind::kGaussianNll : LossKind::kSquaredError, 1.0};
    EXPECT_LT(GradientCheck(net, spec, x, y), 1e-4) << "trial " << trial;
  }
}

TEST(BackpropTest, LossScaleIsLinear) {
  Rng rng(8);
  DenseNet net({3, 6, 4}, Activation::kRelu);
  net.InitializeGlorot(rng);
  const Matrix x = Matrix::Random(5, 3);
  const Matrix y = Matrix::Random(5, 2);
  const Parameters<float> one =
      Backprop(net, LossSpec{LossKind::kGaussianNll, 1.0}, x, y);
  const Parameters<float> two =
      Backprop(net, LossSpec{LossKind::kGaussianNll, 2.0}, x, y);
  for (int l = 0; l < net.num_layers(); ++l) {
    EXPECT_TRUE(two[l].weight.isApprox(2.0f * one[l].weight));
    EXPECT_TRUE(two[l].bias.isApprox(2.0f * one[l].bias));
  }
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  Rng rng(9);
  DenseNet net({4, 7, 3}, Activation::kTanh);
  net.InitializeGlorot(rng);
  net.parameters()[1].bias.setRandom();
  const std::vector<std::uint8_t> bytes = SerializeNet(net);
  const DenseNet loaded = DeserializeNet(bytes);
  EXPECT_EQ(SerializeNet(loaded), bytes);
  EXPECT_EQ(loaded.activation(), Activation::kTanh);
  EXPECT_EQ(loaded.layer_sizes(), net.layer_sizes());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), std::string("MOPPNN1\0", 8));
}

TEST(CheckpointTest, RejectsCorruptInput) {
  DenseNet net({2, 2}, Activation::kRelu);
  std::vector<std::uint8_t> bytes = SerializeNet(net);
  std::vector<std::uint8_t> bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(DeserializeNet(bad_magic), FormatError);
  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
  EXPECT_THROW(DeserializeNet(truncated), FormatError);
  std::vector<std::uint8_t> trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(DeserializeNet(trailing), FormatError);
}

}  // namespace
}  // namespace mopp::nn
