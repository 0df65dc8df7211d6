// Copyright 2026 The dpmi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpmi/common/rng.h"
#include "dpmi/data/dataset.h"
#include "dpmi/nn/backprop.h"
#include "dpmi/nn/network.h"
#include "dpmi/nn/optimizer.h"
#include "dpmi/nn/trainer.h"
#include "gtest/gtest.h"

namespace dpmi::nn {
namespace {

// Straight-line forward pass: matmul, relu on hidden layers, stable softmax.
struct OracleOut {
  std::vector<double> softmax;
  std::vector<double> hidden_pre;  // every hidden pre-activation
};

OracleOut OracleForward(const Network& net, std::span<const double> x) {
  OracleOut out;
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const auto& s = net.layer(k);
    const auto w = net.weights(k);
    const auto b = net.biases(k);
    std::vector<double> z(s.out);
    for (std::size_t r = 0; r < s.out; ++r) {
      double acc = b[r];
      for (std::size_t c = 0; c < s.in; ++c) acc += w[r * s.in + c] * a[c];
      z[r] = acc;
    }
    if (k + 1 < net.num_layers()) {
      out.hidden_pre.insert(out.hidden_pre.end(), z.begin(), z.end());
      for (double& v : z) v = std::max(v, 0.0);
      a = z;
    } else {
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (double& v : z) sum += (v = std::exp(v - mx));
      for (double& v : z) v /= sum;
      out.softmax = z;
    }
  }
  return out;
}

double OracleLoss(const Network& net, std::span<const double> x, int label) {
  return -std::log(std::max(OracleForward(net, x).softmax[label], 1e-12));
}

data::Dataset MakeData(const Matrix& x, std::vector<int> y, int classes) {
  data::Dataset d;
  d.features = x;
  d.labels = std::move(y);
  d.kind = data::FeatureKind::kReal;
  d.num_classes = classes;
  return d;
}

// Two Gaussian blobs around (+2,+2) and (-2,-2).
data::Dataset Separable(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    const double c = y[i] ? 2.0 : -2.0;
    x(i, 0) = c + 0.5 * rng.Normal();
    x(i, 1) = c + 0.5 * rng.Normal();
  }
  return MakeData(x, y, 2);
}

TEST(Network, RejectsBadShapes) {
  Rng rng(1);
  EXPECT_FALSE(Network::Create(std::vector<std::size_t>{3}, rng).ok());
  EXPECT_FALSE(Network::Create(std::vector<std::size_t>{3, 0, 2}, rng).ok());
  auto net = Network::Create(std::vector<std::size_t>{3, 4, 2}, rng);
  ASSERT_TRUE(net.ok());
  EXPECT_EQ(net->num_params(), 3u * 4 + 4 + 4 * 2 + 2);
  EXPECT_EQ(net->input_size(), 3u);
  EXPECT_EQ(net->num_classes(), 2u);
}

TEST(Network, InitializationIsBoundedAndBiasesZero) {
  Rng rng(2);
  const std::vector<std::size_t> sizes = {20, 30, 5};
  auto net = *Network::Create(sizes, rng);
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const double s = std::sqrt(6.0 / (net.layer(k).in + net.layer(k).out));
    for (double w : net.weights(k)) EXPECT_LE(std::abs(w), s);
    for (double b : net.biases(k)) EXPECT_EQ(b, 0.0);
  }
}

TEST(Forward, ZeroNetGivesUniformSoftmax) {
  auto net = *Network::Zeros(std::vector<std::size_t>{4, 6, 5});
  Matrix x(3, 4);
  x(1, 2) = 7.0;
  x(2, 0) = -3.0;
  auto f = *Forward(net, x);
  for (std::size_t i = 0; i < 3; ++i) {
    for (double p : f.softmax.row(i)) EXPECT_DOUBLE_EQ(p, 0.2);
  }
}

TEST(Forward, IdentityNetPicksOneHotClass) {
  auto net = *Network::Zeros(std::vector<std::size_t>{4, 4});
  for (std::size_t k = 0; k < 4; ++k) net.weights(0)[k * 4 + k] = 1.0;
  for (std::size_t k = 0; k < 4; ++k) {
    Matrix x(1, 4);
    x(0, k) = 1.0;
    auto f = *Forward(net, x);
    EXPECT_EQ(Argmax(f.softmax.row(0)), k);
  }
}

TEST(Forward, MatchesStraightLineOracle) {
  Rng rng(3);
  auto net = *Network::Create(std::vector<std::size_t>{4, 7, 3}, rng);
  for (double& b : net.params()) b += 0.1 * rng.Normal();
  Matrix x(20, 4);
  for (double& v : x.values()) v = rng.Normal();
  auto f = *Forward(net, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto want = OracleForward(net, x.row(i)).softmax;
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(f.softmax(i, c), want[c], 1e-12);
      EXPECT_GE(f.softmax(i, c), 0.0);
      sum += f.softmax(i, c);
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
}

TEST(Forward, StableForHugeLogits) {
  auto net = *Network::Zeros(std::vector<std::size_t>{1, 2});
  net.weights(0)[0] = 1e4;
  net.weights(0)[1] = -1e4;
  Matrix x(1, 1, 1.0);
  auto f = *Forward(net, x);
  EXPECT_DOUBLE_EQ(f.softmax(0, 0), 1.0);
  EXPECT_TRUE(std::isfinite(f.softmax(0, 1)));
  EXPECT_NEAR(CrossEntropy(f.softmax.row(0), 1), -std::log(1e-12), 1e-9);
}

TEST(Forward, RejectsWidthMismatch) {
  auto net = *Network::Zeros(std::vector<std::size_t>{3, 2});
  EXPECT_FALSE(Forward(net, Matrix(2, 4)).ok());
}

TEST(Argmax, TiesGoToLowestIndex) {
  const std::vector<double> v = {0.2, 0.4, 0.4};
  EXPECT_EQ(Argmax(v), 1u);
}

// Central differences with step 1e-4 against backprop on random nets of at
// most 100 parameters. Instances with a hidden pre-activation near the relu
// kink are redrawn since the finite difference is not defined there.
TEST(Gradients, MatchFiniteDifferencesOnSmallNets) {
  Rng rng(11);
  int checked = 0;
  while (checked < 100) {
    const std::size_t in = 1 + rng.UniformIndex(4);
    const std::size_t hidden = 1 + rng.UniformIndex(6);
    const std::size_t classes = 2 + rng.UniformIndex(3);
    const std::vector<std::size_t> sizes = {in, hidden, classes};
    auto net = *Network::Create(sizes, rng);
    if (net.num_params() > 100) continue;
    for (double& p : net.params()) p += 0.2 * rng.Normal();
    std::vector<double> x(in);
    for (double& v : x) v = rng.Normal();
    const int label = static_cast<int>(rng.UniformIndex(classes));
    const auto oracle = OracleForward(net, x);
    if (std::any_of(oracle.hidden_pre.begin(), oracle.hidden_pre.end(),
                    [](double z) { return std::abs(z) < 1e-2; })) {
      continue;
    }
    ExampleWorkspace ws(net);
    std::vector<double> grad(net.num_params());
    const double loss = ws.Backprop(net, x, label, grad);
    EXPECT_NEAR(loss, OracleLoss(net, x, label), 1e-12);
    for (std::size_t j = 0; j < net.num_params(); ++j) {
      Network plus = net, minus = net;
      plus.params()[j] += 1e-4;
      minus.params()[j] -= 1e-4;
      const double fd =
          (OracleLoss(plus, x, label) - OracleLoss(minus, x, label)) / 2e-4;
      const double scale = std::max({std::abs(fd), std::abs(grad[j]), 1e-4});
      EXPECT_LE(std::abs(fd - grad[j]) / scale, 1e-3)
          << "instance " << checked << " param " << j;
    }
    ++checked;
  }
}

TEST(Gradients, TenParameterNetMatchesFiniteDifferences) {
  Rng rng(12);
  // 3 inputs, 1 hidden unit, 3 classes: (3 + 1) + (3 + 3) parameters.
  auto net = *Network::Create(std::vector<std::size_t>{3, 1, 3}, rng);
  ASSERT_EQ(net.num_params(), 10u);
  net.biases(0)[0] = 0.5;
  const std::vector<double> x = {0.3, -0.7, 1.1};
  ExampleWorkspace ws(net);
  std::vector<double> grad(10);
  ws.Backprop(net, x, 2, grad);
  for (std::size_t j = 0; j < 10; ++j) {
    Network p = net, m = net;
    p.params()[j] += 1e-4;
    m.params()[j] -= 1e-4;
    const double fd = (OracleLoss(p, x, 2) - OracleLoss(m, x, 2)) / 2e-4;
    EXPECT_LE(std::abs(fd - grad[j]), 1e-3 * std::max(std::abs(fd), 1e-4));
  }
}

TEST(Gradients, ConfidentCorrectPredictionHasNearZeroLossAndGradient) {
  auto net = *Network::Zeros(std::vector<std::size_t>{2, 2});
  net.weights(0)[0] = 50.0;  // class 0 logit = 50 * x0
  const std::vector<double> x = {1.0, 0.0};
  ExampleWorkspace ws(net);
  std::vector<double> grad(net.num_params());
  const double loss = ws.Backprop(net, x, 0, grad);
  EXPECT_LT(loss, 1e-12);
  double norm = 0.0;
  for (double g : grad) norm += g * g;
  EXPECT_LT(std::sqrt(norm), 1e-12);
}

TEST(Gradients, PerExampleSumEqualsBatchGradient) {
  Rng rng(13);
  auto net = *Network::Create(std::vector<std::size_t>{5, 8, 3}, rng);
  Matrix x(6, 5);
  for (double& v : x.values()) v = rng.Normal();
  std::vector<int> y = {0, 1, 2, 2, 1, 0};
  auto pe = *ComputePerExampleGradients(net, x, y);
  ASSERT_EQ(pe.grads.rows(), 6u);
  // Gradient of the mean loss by finite differences.
  auto mean_loss = [&](const Network& n) {
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) s += OracleLoss(n, x.row(i), y[i]);
    return s / 6.0;
  };
  for (std::size_t j = 0; j < net.num_params(); j += 7) {
    double mean_grad = 0.0;
    for (std::size_t i = 0; i < 6; ++i) mean_grad += pe.grads(i, j);
    mean_grad /= 6.0;
    Network p = net, m = net;
    p.params()[j] += 1e-5;
    m.params()[j] -= 1e-5;
    EXPECT_NEAR(mean_grad, (mean_loss(p) - mean_loss(m)) / 2e-5, 1e-6);
  }
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_GE(pe.losses[i], 0.0);
    EXPECT_DOUBLE_EQ(pe.losses[i], OracleLoss(net, x.row(i), y[i]));
  }
}

TEST(Gradients, DuplicatedRecordGivesIdenticalGradients) {
  Rng rng(14);
  auto net = *Network::Create(std::vector<std::size_t>{4, 5, 2}, rng);
  Matrix x(2, 4);
  for (std::size_t c = 0; c < 4; ++c) x(0, c) = x(1, c) = rng.Normal();
  auto pe = *ComputePerExampleGradients(net, x, std::vector<int>{1, 1});
  for (std::size_t j = 0; j < net.num_params(); ++j) {
    EXPECT_EQ(pe.grads(0, j), pe.grads(1, j));
  }
}

TEST(Optimizer, SgdStepIsExact) {
  OptimizerConfig c;
  c.kind = OptimizerKind::kSgd;
  c.learning_rate = 0.1;
  OptimizerState s(c, 1);
  std::vector<double> theta = {1.0};
  const std::vector<double> g = {2.0};
  ASSERT_TRUE(s.Apply(theta, g).ok());
  EXPECT_DOUBLE_EQ(theta[0], 0.8);
  EXPECT_EQ(s.step(), 1u);
}

TEST(Optimizer, ZeroGradientLeavesParametersAndDecaysMoments) {
  OptimizerConfig c;
  OptimizerState s(c, 2);
  std::vector<double> theta = {1.0, -1.0};
  ASSERT_TRUE(s.Apply(theta, std::vector<double>{1.0, 2.0}).ok());
  const std::vector<double> m1(s.first_moment().begin(), s.first_moment().end());
  const std::vector<double> v1(s.second_moment().begin(), s.second_moment().end());
  const std::vector<double> before = theta;
  ASSERT_TRUE(s.Apply(theta, std::vector<double>{0.0, 0.0}).ok());
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(s.first_moment()[i], 0.9 * m1[i]);
    EXPECT_DOUBLE_EQ(s.second_moment()[i], 0.999 * v1[i]);
  }
  // On fresh state a zero gradient leaves theta alone.
  OptimizerState fresh(c, 2);
  std::vector<double> t2 = before;
  ASSERT_TRUE(fresh.Apply(t2, std::vector<double>{0.0, 0.0}).ok());
  EXPECT_EQ(t2, before);
}

TEST(Optimizer, AdamFollowsScalarRecursionOnQuadratic) {
  // f(theta) = 0.5 * theta^2, gradient theta.
  OptimizerConfig c;
  c.learning_rate = 0.1;
  OptimizerState s(c, 1);
  std::vector<double> theta = {3.0};
  double t = 3.0, m = 0.0, v = 0.0;
  for (int step = 1; step <= 5; ++step) {
    const double g = t;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, step));
    const double vh = v / (1 - std::pow(0.999, step));
    t -= 0.1 * mh / (std::sqrt(vh) + 1e-7);
    ASSERT_TRUE(s.Apply(theta, std::vector<double>{theta[0]}).ok());
    EXPECT_NEAR(theta[0], t, 1e-14) << "step " << step;
  }
  EXPECT_EQ(s.step(), 5u);
}

TEST(Optimizer, RejectsShapeMismatch) {
  OptimizerState s(OptimizerConfig{}, 3);
  std::vector<double> theta(3);
  EXPECT_FALSE(s.Apply(theta, std::vector<double>(2)).ok());
}

TEST(Fit, SeparableToyReachesPerfectTrainAccuracy) {
  const auto train = Separable(200, 1), test = Separable(100, 2);
  Rng rng(5);
  auto net = *Network::Create(std::vector<std::size_t>{2, 8, 2}, rng);
  TrainConfig tc;
  tc.batch_size = 16;
  tc.max_epochs = 200;
  tc.early_stopping = false;
  tc.seed = 9;
  auto report = *Fit(net, train, test, tc);
  EXPECT_LE(report.stop_epoch, 200u);
  EXPECT_DOUBLE_EQ(*EvaluateAccuracy(net, train), 1.0);
  EXPECT_EQ(report.stop_reason, StopReason::kMaxEpochs);
  EXPECT_EQ(report.epochs.size(), report.stop_epoch);
}

TEST(Fit, SameSeedGivesIdenticalWeightsAndReport) {
  const auto train = Separable(64, 3), test = Separable(32, 4);
  TrainConfig tc;
  tc.batch_size = 10;  // partial last batch
  tc.max_epochs = 20;
  tc.seed = 77;
  Rng r1(8), r2(8);
  auto a = *Network::Create(std::vector<std::size_t>{2, 4, 2}, r1);
  auto b = *Network::Create(std::vector<std::size_t>{2, 4, 2}, r2);
  auto ra = *Fit(a, train, test, tc);
  auto rb = *Fit(b, train, test, tc);
  EXPECT_EQ(a, b);
  ASSERT_EQ(ra.epochs.size(), rb.epochs.size());
  for (std::size_t e = 0; e < ra.epochs.size(); ++e) {
    EXPECT_EQ(ra.epochs[e].test_loss, rb.epochs[e].test_loss);
  }
  EXPECT_EQ(ra.steps, rb.steps);
  EXPECT_EQ(ra.steps, ra.stop_epoch * 7);  // ceil(64 / 10)
}

TEST(Fit, PatienceZeroStopsAtFirstNonImprovingEpoch) {
  // lr 0 never improves the test loss: the first epoch sets the best value,
  // the second fails to improve it.
  const auto train = Separable(20, 5), test = Separable(20, 6);
  Rng rng(1);
  auto net = *Network::Create(std::vector<std::size_t>{2, 3, 2}, rng);
  TrainConfig tc;
  tc.optimizer.kind = OptimizerKind::kSgd;
  tc.optimizer.learning_rate = 0.0;
  tc.patience = 0;
  tc.max_epochs = 50;
  auto report = *Fit(net, train, test, tc);
  EXPECT_EQ(report.stop_reason, StopReason::kEarlyStop);
  EXPECT_EQ(report.stop_epoch, 2u);
}

TEST(Fit, RejectsEmptyData) {
  Rng rng(1);
  auto net = *Network::Create(std::vector<std::size_t>{2, 2}, rng);
  data::Dataset empty = MakeData(Matrix(0, 2), {}, 2);
  EXPECT_FALSE(Fit(net, empty, Separable(4, 1), TrainConfig{}).ok());
  EXPECT_FALSE(EvaluateAccuracy(net, empty).ok());
}

TEST(Fit, AbortsOnNonFiniteLoss) {
  auto train = Separable(20, 7);
  train.features(3, 0) = std::numeric_limits<double>::infinity();
  Rng rng(1);
  auto net = *Network::Create(std::vector<std::size_t>{2, 3, 2}, rng);
  TrainConfig tc;
  tc.max_epochs = 3;
  auto report = Fit(net, train, Separable(10, 8), tc);
  EXPECT_FALSE(report.ok());
}

TEST(Accuracy, CountsArgmaxHits) {
  auto net = *Network::Zeros(std::vector<std::size_t>{2, 2});
  net.weights(0)[0] = 1.0;  // class 0 when x0 > x1
  net.weights(0)[3] = 1.0;
  Matrix x(10, 2);
  std::vector<int> y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    x(i, i % 2) = 1.0;
    y[i] = static_cast<int>(i % 2);
  }
  // Flip three labels: 7 of 10 correct.
  y[0] = 1;
  y[3] = 0;
  y[8] = 1;
  EXPECT_DOUBLE_EQ(*EvaluateAccuracy(net, MakeData(x, y, 2)), 0.7);
}

TEST(Accuracy, ZeroNetScoresTieBreakClassFrequency) {
  auto net = *Network::Zeros(std::vector<std::size_t>{3, 10});
  Matrix x(100, 3, 1.0);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = static_cast<int>(i % 10);
  EXPECT_DOUBLE_EQ(*EvaluateAccuracy(net, MakeData(x, y, 10)), 0.1);
}

}  // namespace
}  // namespace dpmi::nn
