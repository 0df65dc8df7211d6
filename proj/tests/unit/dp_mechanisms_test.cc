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

#include <cmath>
#include <numeric>
#include <vector>

#include "dpmi/common/rng.h"
#include "dpmi/dp/mechanisms.h"
#include "dpmi/dp/privacy_spec.h"
#include "gtest/gtest.h"

namespace dpmi::dp {
namespace {

double KeepRate(double rho, int bit, int trials, std::uint64_t seed) {
  Rng rng(seed);
  int kept = 0;
  for (int i = 0; i < trials; ++i) kept += *RrPerturbBit(bit, rho, rng) == bit;
  return static_cast<double>(kept) / trials;
}

TEST(RandomizedResponse, HalfRetentionIsLnThree) {
  EXPECT_NEAR(*RrBudget(0.5), std::log(3.0), 1e-12);
  EXPECT_NEAR(*RrBudget(0.5), 1.0986, 1e-4);
}

TEST(RandomizedResponse, ZeroRetentionIsZeroBudget) {
  EXPECT_EQ(*RrBudget(0.0), 0.0);
  EXPECT_EQ(*RrRetention(0.0), 0.0);
}

TEST(RandomizedResponse, RetentionForGridEndpoints) {
  EXPECT_NEAR(*RrRetention(0.1), 0.0500, 1e-3);
  EXPECT_NEAR(*RrRetention(3.0), 0.9051, 1e-3);
  EXPECT_NEAR(*RrRetention(0.1), std::tanh(0.05), 1e-15);
}

TEST(RandomizedResponse, RoundTrip) {
  for (double eps = 0.0; eps <= 10.0; eps += 0.01) {
    EXPECT_NEAR(*RrBudget(*RrRetention(eps)), eps, 1e-12) << eps;
  }
}

TEST(RandomizedResponse, RejectsOutOfRange) {
  EXPECT_FALSE(RrBudget(1.0).ok());
  EXPECT_FALSE(RrBudget(-0.1).ok());
  EXPECT_FALSE(RrRetention(-1.0).ok());
  EXPECT_FALSE(RrRetention(std::numeric_limits<double>::infinity()).ok());
  Rng rng(1);
  EXPECT_FALSE(RrPerturbBit(0, 1.0, rng).ok());
  EXPECT_FALSE(RrPerturbBit(2, 0.5, rng).ok());
  EXPECT_FALSE(RrParams::FromRetention(1.0).ok());
}

TEST(RandomizedResponse, ParamsStayConsistent) {
  auto p = *RrParams::FromBudget(std::log(3.0));
  EXPECT_NEAR(p.retention(), 0.5, 1e-12);
  auto q = *RrParams::FromRetention(0.5);
  EXPECT_NEAR(q.budget(), std::log(3.0), 1e-12);
}

TEST(RandomizedResponse, NearOneRetentionKeepsBits) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(*RrPerturbBit(i % 2, 1.0 - 1e-12, rng), i % 2);
  }
}

TEST(RandomizedResponse, ZeroRetentionIsUniform) {
  Rng rng(4);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += *RrPerturbBit(0, 0.0, rng);
  EXPECT_NEAR(ones / 10000.0, 0.5, 0.02);
}

TEST(RandomizedResponse, HalfRetentionKeepsThreeQuarters) {
  EXPECT_NEAR(KeepRate(0.5, 1, 10000, 5), 0.75, 0.02);
  EXPECT_NEAR(KeepRate(0.5, 0, 10000, 6), 0.75, 0.02);
}

TEST(RandomizedResponse, DeniabilityRatioWithinBudget) {
  const double rho = 0.6;
  const double eps = *RrBudget(rho);
  const int n = 100000;
  const double p11 = KeepRate(rho, 1, n, 7);
  const double p10 = 1.0 - KeepRate(rho, 0, n, 8);
  const double ratio = p11 / p10;
  // Standard error of the ratio by the delta method.
  const double se = ratio * std::sqrt((1 - p11) / (n * p11) + (1 - p10) / (n * p10));
  EXPECT_LE(ratio, std::exp(eps) + 3 * se);
  EXPECT_GE(ratio, std::exp(eps) - 3 * se);
}

TEST(LocalComposition, RecordBudgetsScaleWithWidth) {
  Rng rng(9);
  std::vector<double> bits(600, 1.0);
  auto low = *LdpPerturbRecord(bits, *RrRetention(0.1), rng);
  EXPECT_NEAR(low.epsilon, 60.0, 1e-9);
  auto high = *LdpPerturbRecord(bits, *RrRetention(3.0), rng);
  EXPECT_NEAR(high.epsilon, 1800.0, 1e-9);
  auto empty = *LdpPerturbRecord(std::vector<double>{}, 0.5, rng);
  EXPECT_TRUE(empty.bits.empty());
  EXPECT_EQ(empty.epsilon, 0.0);
}

TEST(LocalComposition, RejectsNonBinaryRecord) {
  Rng rng(1);
  EXPECT_FALSE(LdpPerturbRecord(std::vector<double>{0, 1, 2}, 0.5, rng).ok());
}

TEST(LocalComposition, Sums) {
  EXPECT_EQ(*ComposeLocalBudget(std::vector<double>{1, 2, 3}), 6.0);
  EXPECT_EQ(*ComposeLocalBudget(std::vector<double>{}), 0.0);
  EXPECT_EQ(*ComposeLocalBudget(std::vector<double>(600, 0.1)), 60.0);
  EXPECT_EQ(*ComposeLocalBudget(std::vector<double>(600, 3.0)), 1800.0);
  EXPECT_NEAR(*ComposeLocalBudget(std::vector<double>(6382, 0.1)), 638.2, 1e-9);
  EXPECT_FALSE(ComposeLocalBudget(std::vector<double>{1, -1}).ok());
}

TEST(LocalComposition, AdditiveOverConcatenation) {
  const std::vector<double> a = {0.25, 0.5, 0.125}, b = {1.0, 0.0625};
  std::vector<double> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  EXPECT_EQ(*ComposeLocalBudget(ab),
            *ComposeLocalBudget(a) + *ComposeLocalBudget(b));
}

TEST(Pixelation, LaplaceScale) {
  PixelationParams p{250.0, 1, 1.0};
  EXPECT_DOUBLE_EQ(p.LaplaceScale(), 63750.0);
  PixelationParams q{4.0, 2, 0.5};
  EXPECT_DOUBLE_EQ(q.LaplaceScale(), 255.0 * 4.0 / (4.0 * 0.5));
  EXPECT_FALSE((PixelationParams{1.0, 0, 1.0}).Validate().ok());
  EXPECT_FALSE((PixelationParams{1.0, 1, 0.0}).Validate().ok());
}

TEST(Pixelation, HugeBudgetKeepsImage) {
  Rng rng(10);
  Matrix img(8, 8);
  for (std::size_t i = 0; i < 64; ++i) img.values()[i] = (i * 37) % 256;
  auto out = *PixelateImage(img, PixelationParams{1.0, 1, 1e9}, rng);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_LT(std::abs(out.values()[i] - img.values()[i]), 1.0);
  }
}

TEST(Pixelation, NoiseIsMeanZero) {
  Rng rng(11);
  const PixelationParams p{1.0, 1, 5.0};  // lambda = 51
  Matrix img(1, 1, 128.0);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += (*PixelateImage(img, p, rng))(0, 0);
  // Clamping is symmetric around 128 up to one grey level.
  EXPECT_NEAR(sum / 10000.0, 128.0, 3.0 * p.LaplaceScale() / 100.0);
}

TEST(Pixelation, PreservesShapeAndRange) {
  Rng rng(12);
  Matrix img(9, 7);
  for (double& v : img.values()) v = rng.UniformIndex(256);
  for (std::size_t b : {1u, 2u, 3u}) {
    auto out = *PixelateImage(img, PixelationParams{10.0, b, 0.5}, rng);
    ASSERT_EQ(out.rows(), 9u);
    ASSERT_EQ(out.cols(), 7u);
    for (double v : out.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 255.0);
    }
  }
}

TEST(Pixelation, CoarseningAveragesCells) {
  Rng rng(13);
  Matrix img(4, 4);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) img(r, c) = 10.0 * (r / 2) + 100.0 * (c / 2) + (r + c) % 2;
  }
  auto out = *PixelateImage(img, PixelationParams{1.0, 2, 1e12}, rng);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_NEAR(out(r, c), 10.0 * (r / 2) + 100.0 * (c / 2) + 0.5, 1e-6);
    }
  }
}

TEST(Pixelation, RejectsBadImages) {
  Rng rng(1);
  EXPECT_FALSE(PixelateImage(Matrix(2, 2, 300.0), PixelationParams{}, rng).ok());
  EXPECT_FALSE(PixelateImage(Matrix(2, 2, 1.0), PixelationParams{1.0, 3, 1.0}, rng).ok());
}

Adjacency Ring(std::size_t n) {
  Adjacency a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, (i + 1) % n) = 1;
    a((i + 1) % n, i) = 1;
  }
  return a;
}

void ExpectValidGraph(const Adjacency& a) {
  EXPECT_TRUE(a.IsSymmetric());
  for (std::size_t i = 0; i < a.nodes(); ++i) {
    EXPECT_EQ(a(i, i), 0);
    EXPECT_GE(a.Degree(i), 1u);
  }
}

TEST(EdgeRr, NearOneRetentionKeepsGraph) {
  Rng rng(14);
  const Adjacency ring = Ring(12);
  EXPECT_EQ(*EdgeRrAdjacency(ring, 1.0 - 1e-12, rng), ring);
}

TEST(EdgeRr, OutputIsAlwaysValid) {
  Rng rng(15);
  for (double rho : {0.0, 0.3, 0.9}) {
    for (std::size_t n : {2u, 3u, 10u}) {
      ExpectValidGraph(*EdgeRrAdjacency(Adjacency(n), rho, rng));
      ExpectValidGraph(*EdgeRrAdjacency(Ring(n), rho, rng));
    }
  }
}

TEST(EdgeRr, ZeroRetentionHasHalfDensity) {
  Rng rng(16);
  const std::size_t n = 40;
  auto out = *EdgeRrAdjacency(Adjacency(n), 0.0, rng);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges += out(i, j);
  }
  EXPECT_NEAR(edges / (n * (n - 1) / 2.0), 0.5, 0.05);
}

TEST(EdgeRr, RejectsNonSquare) {
  EXPECT_FALSE(Adjacency::FromMatrix(Matrix(2, 3)).ok());
  EXPECT_FALSE(Adjacency::FromMatrix(Matrix(2, 2, 0.5)).ok());
}

TEST(GaussianCalibration, ClosedForm) {
  EXPECT_NEAR(*GaussianSigmaFor(0.5, 1e-5, 1.0), 9.690, 1e-3);
  EXPECT_NEAR(*GaussianSigmaFor(0.5, 1e-5, 2.0), 2.0 * *GaussianSigmaFor(0.5, 1e-5, 1.0), 1e-12);
  EXPECT_FALSE(GaussianSigmaFor(1.5, 1e-5, 1.0).ok());
  EXPECT_FALSE(GaussianSigmaFor(0.5, 0.0, 1.0).ok());
  EXPECT_FALSE(GaussianSigmaFor(0.5, 1e-5, 0.0).ok());
  auto c = *CalibrateGaussian(0.5, 1e-5, 1.0);
  EXPECT_EQ(c.scale, *GaussianSigmaFor(0.5, 1e-5, 1.0));
}

TEST(LaplaceCalibration, ScaleIsSensitivityOverEpsilon) {
  EXPECT_DOUBLE_EQ(*LaplaceScaleFor(2.0, 1.0), 0.5);
  EXPECT_FALSE(LaplaceScaleFor(0.0, 1.0).ok());
}

TEST(PrivacySpec, PerturbsBinaryWithComposedBudget) {
  data::Dataset d;
  d.kind = data::FeatureKind::kBinary;
  d.num_classes = 2;
  d.features = Matrix(50, 20);
  d.labels.assign(50, 0);
  for (std::size_t i = 0; i < 50; ++i) d.labels[i] = i % 2;
  PrivacySpec spec;
  spec.mode = PrivacyMode::kLdp;
  spec.epsilon_i = 0.5;
  Rng rng(17);
  auto p = *PerturbDataset(d, spec, rng);
  EXPECT_NEAR(p.epsilon, 20 * 0.5, 1e-12);
  EXPECT_EQ(p.dataset.labels, d.labels);
  EXPECT_NE(p.dataset.features, d.features);
  EXPECT_TRUE(p.dataset.Validate().ok());
}

TEST(PrivacySpec, RejectsRealFeaturesAndWrongMode) {
  data::Dataset d;
  d.kind = data::FeatureKind::kReal;
  d.num_classes = 2;
  d.features = Matrix(2, 2);
  d.labels = {0, 1};
  PrivacySpec spec;
  spec.mode = PrivacyMode::kLdp;
  Rng rng(1);
  EXPECT_FALSE(PerturbDataset(d, spec, rng).ok());
  spec.mode = PrivacyMode::kCdp;
  d.kind = data::FeatureKind::kBinary;
  EXPECT_FALSE(PerturbDataset(d, spec, rng).ok());
}

TEST(PrivacySpec, ModeNamesRoundTrip) {
  for (auto m : {PrivacyMode::kNone, PrivacyMode::kLdp, PrivacyMode::kCdp}) {
    EXPECT_EQ(*ParsePrivacyMode(PrivacyModeName(m)), m);
  }
  EXPECT_FALSE(ParsePrivacyMode("shuffle").ok());
}

}  // namespace
}  // namespace dpmi::dp
