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

#include <chrono>
#include <cmath>
#include <vector>

#include "dpmi/common/rng.h"
#include "dpmi/data/dataset.h"
#include "dpmi/dp/dp_optimizer.h"
#include "dpmi/dp/rdp_accountant.h"
#include "dpmi/nn/backprop.h"
#include "dpmi/nn/network.h"
#include "dpmi/nn/optimizer.h"
#include "dpmi/nn/trainer.h"
#include "gtest/gtest.h"

namespace dpmi::dp {
namespace {

data::Dataset Blobs(std::size_t n, std::uint64_t seed, double spread = 0.5) {
  Rng rng(seed);
  data::Dataset d;
  d.kind = data::FeatureKind::kReal;
  d.num_classes = 2;
  d.features = Matrix(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    const double c = y ? 1.5 : -1.5;
    d.features(i, 0) = c + spread * rng.Normal();
    d.features(i, 1) = c + spread * rng.Normal();
    d.labels.push_back(y);
  }
  return d;
}

nn::Network SmallNet(std::uint64_t seed) {
  Rng rng(seed);
  return *nn::Network::Create(std::vector<std::size_t>{2, 8, 2}, rng);
}

TEST(Clip, ScalesLongGradientToBound) {
  std::vector<double> g = {6.0, 8.0};  // norm 10
  EXPECT_DOUBLE_EQ(ClipPerExample(g, 4.0), 10.0);
  EXPECT_NEAR(g[0], 2.4, 1e-15);
  EXPECT_NEAR(g[1], 3.2, 1e-15);
}

TEST(Clip, LeavesShortGradientAlone) {
  std::vector<double> g = {0.3, -0.4};
  ClipPerExample(g, 4.0);
  EXPECT_EQ(g[0], 0.3);
  EXPECT_EQ(g[1], -0.4);
}

TEST(Clip, ResultNeverExceedsBound) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> g(17);
    for (double& v : g) v = 10.0 * rng.Normal();
    const double c = 0.1 + 5.0 * rng.Uniform();
    ClipPerExample(g, c);
    double sq = 0.0;
    for (double v : g) sq += v * v;
    EXPECT_LE(std::sqrt(sq), c * (1 + 1e-12));
  }
}

TEST(Params, Validation) {
  CdpParams p;
  EXPECT_TRUE(p.Validate().ok());
  p.clip_norm = 0.0;
  EXPECT_FALSE(p.Validate().ok());
  p.clip_norm = kNoClipping;
  EXPECT_TRUE(p.Validate().ok());
  p.noise_multiplier = 1.0;
  EXPECT_FALSE(p.Validate().ok());
  p.clip_norm = 1.0;
  p.noise_multiplier = -1.0;
  EXPECT_FALSE(p.Validate().ok());
  p.noise_multiplier = 1.0;
  p.delta = 1.5;
  EXPECT_FALSE(p.Validate().ok());
  p.delta = 1e-5;
  EXPECT_DOUBLE_EQ(p.sigma(), 1.0);
}

// Replays one step by hand: clip each row, sum, add N(0, (zC)^2) drawn from
// an identically seeded generator, average, SGD with learning rate 1.
TEST(DpStep, ReplaysClipSumNoiseAverage) {
  nn::Network net = SmallNet(5);
  const nn::Network before = net;
  const std::size_t p = net.num_params();
  Matrix grads(2, p);
  Rng fill(6);
  for (double& v : grads.values()) v = fill.Normal();
  const Matrix raw = grads;

  CdpParams params;
  params.clip_norm = 1.0;
  params.noise_multiplier = 1.0;
  nn::OptimizerConfig oc;
  oc.kind = nn::OptimizerKind::kSgd;
  oc.learning_rate = 1.0;
  nn::OptimizerState state(oc, p);
  Rng noise(42);
  ASSERT_TRUE(DpStep(net, state, grads, params, noise).ok());

  std::vector<double> want(p, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    double sq = 0.0;
    for (double v : raw.row(i)) sq += v * v;
    const double f = std::min(1.0, 1.0 / std::sqrt(sq));
    for (std::size_t j = 0; j < p; ++j) want[j] += f * raw(i, j);
  }
  Rng replay(42);
  for (double& v : want) v = (v + replay.Normal(0.0, 1.0)) / 2.0;
  for (std::size_t j = 0; j < p; ++j) {
    EXPECT_NEAR(net.params()[j], before.params()[j] - want[j], 1e-12) << j;
  }
  // The generator advanced by exactly one draw per coordinate.
  EXPECT_EQ(noise.Uniform(), replay.Uniform());
}

TEST(DpStep, NoNoiseDrawnWhenSigmaIsZero) {
  nn::Network net = SmallNet(7);
  Matrix grads(3, net.num_params(), 0.25);
  CdpParams params;
  params.noise_multiplier = 0.0;
  nn::OptimizerState state(nn::OptimizerConfig{}, net.num_params());
  Rng noise(9);
  Rng untouched(9);
  ASSERT_TRUE(DpStep(net, state, grads, params, noise).ok());
  EXPECT_EQ(noise.Uniform(), untouched.Uniform());
}

TEST(DpStep, RejectsBadLots) {
  nn::Network net = SmallNet(7);
  nn::OptimizerState state(nn::OptimizerConfig{}, net.num_params());
  Rng noise(1);
  Matrix empty(0, net.num_params());
  EXPECT_FALSE(DpStep(net, state, empty, CdpParams{}, noise).ok());
  Matrix narrow(2, 3);
  EXPECT_FALSE(DpStep(net, state, narrow, CdpParams{}, noise).ok());
  Matrix bad(1, net.num_params());
  bad(0, 0) = std::nan("");
  EXPECT_FALSE(DpStep(net, state, bad, CdpParams{}, noise).ok());
}

// The noisy average is an unbiased estimate of the clipped average: the
// mean update over many independent steps sits within 3 standard errors.
TEST(DpStep, NoiseIsUnbiased) {
  const nn::Network start = SmallNet(11);
  const std::size_t p = start.num_params();
  const std::size_t lot = 4;
  Matrix grads0(lot, p);
  Rng fill(12);
  for (double& v : grads0.values()) v = 0.1 * fill.Normal();
  std::vector<double> clipped_mean(p, 0.0);
  {
    Matrix g = grads0;
    for (std::size_t i = 0; i < lot; ++i) ClipPerExample(g.row(i), 0.5);
    for (std::size_t i = 0; i < lot; ++i) {
      for (std::size_t j = 0; j < p; ++j) clipped_mean[j] += g(i, j) / lot;
    }
  }
  CdpParams params;
  params.clip_norm = 0.5;
  params.noise_multiplier = 2.0;
  nn::OptimizerConfig oc;
  oc.kind = nn::OptimizerKind::kSgd;
  oc.learning_rate = 1.0;
  const int reps = 1000;
  std::vector<double> mean_update(p, 0.0);
  Rng noise(13);
  for (int r = 0; r < reps; ++r) {
    nn::Network net = start;
    nn::OptimizerState state(oc, p);
    Matrix g = grads0;
    ASSERT_TRUE(DpStep(net, state, g, params, noise).ok());
    for (std::size_t j = 0; j < p; ++j) {
      mean_update[j] += (start.params()[j] - net.params()[j]) / reps;
    }
  }
  const double se = params.sigma() / lot / std::sqrt(static_cast<double>(reps));
  for (std::size_t j = 0; j < p; ++j) {
    EXPECT_NEAR(mean_update[j], clipped_mean[j], 3.0 * se) << j;
  }
}

TEST(DpFit, NoNoiseNoClippingMatchesPlainFit) {
  const auto start = std::chrono::steady_clock::now();
  const data::Dataset train = Blobs(200, 21);
  const data::Dataset test = Blobs(100, 22);
  nn::TrainConfig tc;
  tc.batch_size = 16;
  tc.max_epochs = 20;
  tc.early_stopping = false;
  tc.seed = 23;
  tc.optimizer.learning_rate = 0.01;
  nn::Network plain = SmallNet(24);
  nn::Network priv = plain;
  auto fit = *nn::Fit(plain, train, test, tc);
  CdpParams params;
  params.clip_norm = kNoClipping;
  params.noise_multiplier = 0.0;
  auto dp = *DpFit(priv, train, test, params, tc);
  EXPECT_EQ(dp.report.steps, fit.steps);
  for (std::size_t j = 0; j < plain.num_params(); ++j) {
    EXPECT_NEAR(priv.params()[j], plain.params()[j], 1e-6);
  }
  EXPECT_TRUE(IsNoPrivacy(dp.epsilon));
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start).count(), 30.0);
}

TEST(DpFit, ReportedEpsilonMatchesAccountant) {
  const data::Dataset train = Blobs(120, 31);
  nn::TrainConfig tc;
  tc.batch_size = 12;
  tc.max_epochs = 3;
  tc.early_stopping = false;
  CdpParams params;
  params.clip_norm = 1.0;
  params.noise_multiplier = 1.1;
  nn::Network net = SmallNet(32);
  auto r = *DpFit(net, train, train, params, tc);
  EXPECT_EQ(r.report.steps, 30u);
  EXPECT_DOUBLE_EQ(r.sampling_ratio, 0.1);
  EXPECT_DOUBLE_EQ(r.delta, 1.0 / 120);
  EXPECT_DOUBLE_EQ(r.epsilon, *AccountTraining(0.1, 1.1, 30, 1.0 / 120));
  EXPECT_DOUBLE_EQ(r.epsilon, *DpFitEpsilon(120, 12, 30, params));
}

TEST(DpFit, SameSeedIsReproducible) {
  const data::Dataset train = Blobs(80, 41);
  nn::TrainConfig tc;
  tc.batch_size = 8;
  tc.max_epochs = 4;
  tc.seed = 5;
  CdpParams params;
  params.clip_norm = 1.0;
  params.noise_multiplier = 1.0;
  nn::Network a = SmallNet(42), b = SmallNet(42);
  ASSERT_TRUE(DpFit(a, train, train, params, tc).ok());
  ASSERT_TRUE(DpFit(b, train, train, params, tc).ok());
  EXPECT_EQ(a, b);
  tc.seed = 6;
  nn::Network c = SmallNet(42);
  ASSERT_TRUE(DpFit(c, train, train, params, tc).ok());
  EXPECT_NE(a, c);
}

TEST(DpFit, HeavyNoiseCostsAccuracy) {
  const data::Dataset train = Blobs(400, 51, 1.0);
  const data::Dataset test = Blobs(400, 52, 1.0);
  nn::TrainConfig tc;
  tc.batch_size = 10;
  tc.max_epochs = 1;
  tc.early_stopping = false;
  tc.optimizer.kind = nn::OptimizerKind::kSgd;
  tc.optimizer.learning_rate = 0.5;
  CdpParams clean;
  clean.clip_norm = 1.0;
  CdpParams noisy = clean;
  noisy.noise_multiplier = 16.0;
  double acc_clean = 0.0, acc_noisy = 0.0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    tc.seed = s;
    nn::Network a = SmallNet(60 + s), b = SmallNet(60 + s);
    ASSERT_TRUE(DpFit(a, train, test, clean, tc).ok());
    ASSERT_TRUE(DpFit(b, train, test, noisy, tc).ok());
    acc_clean += *nn::EvaluateAccuracy(a, test) / 3;
    acc_noisy += *nn::EvaluateAccuracy(b, test) / 3;
  }
  EXPECT_GT(acc_clean, 0.85);
  EXPECT_LT(acc_noisy, acc_clean - 0.05);
}

TEST(DpFit, ExplicitDeltaIsUsed) {
  CdpParams params;
  params.noise_multiplier = 1.0;
  params.delta = 1e-5;
  EXPECT_DOUBLE_EQ(*DpFitEpsilon(1000, 10, 100, params),
                   *AccountTraining(0.01, 1.0, 100, 1e-5));
  EXPECT_FALSE(DpFitEpsilon(0, 10, 100, params).ok());
}

}  // namespace
}  // namespace dpmi::dp
