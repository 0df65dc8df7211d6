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
#include "dpmi/metrics/roc.h"
#include "dpmi/metrics/tradeoff.h"
#include "gtest/gtest.h"

namespace dpmi::metrics {
namespace {

// P[s_member > s_non] + P[tie] / 2 over all pairs.
double MannWhitney(const std::vector<double>& s,
                   const std::vector<std::uint8_t>& f) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!f[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (f[j]) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

TEST(Roc, HandEnumeratedExample) {
  const std::vector<double> s = {0.9, 0.4, 0.6, 0.3};
  const std::vector<std::uint8_t> f = {1, 1, 0, 0};
  auto roc = *BuildRoc(s, f);
  const std::vector<RocPoint> want = {
      {0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}};
  EXPECT_EQ(roc.points, want);
  EXPECT_EQ(Auc(roc), 0.75);
}

TEST(Roc, OracleAndConstantScores) {
  const std::vector<std::uint8_t> f = {1, 0, 1, 0, 0};
  std::vector<double> oracle(f.begin(), f.end());
  auto roc = *BuildRoc(oracle, f);
  EXPECT_NE(std::find(roc.points.begin(), roc.points.end(), RocPoint{0, 1}),
            roc.points.end());
  EXPECT_EQ(Auc(roc), 1.0);
  const std::vector<double> flat(5, 0.3);
  auto diag = *BuildRoc(flat, f);
  const std::vector<RocPoint> want = {{0, 0}, {1, 1}};
  EXPECT_EQ(diag.points, want);
  EXPECT_EQ(Auc(diag), 0.5);
}

TEST(Roc, SingleClassIsAnError) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_FALSE(BuildRoc(s, std::vector<std::uint8_t>{1, 1}).ok());
  EXPECT_FALSE(BuildRoc(s, std::vector<std::uint8_t>{0, 0}).ok());
  EXPECT_FALSE(BuildRoc(s, std::vector<std::uint8_t>{0}).ok());
}

TEST(Roc, AucEqualsMannWhitneyOnRandomInstances) {
  Rng rng(2026);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.UniformIndex(49);
    std::vector<double> s(n);
    std::vector<std::uint8_t> f(n);
    // Coarse scores so ties are common.
    const std::size_t levels = 1 + rng.UniformIndex(10);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.UniformIndex(levels)) / levels;
      f[i] = rng.Bernoulli(0.5);
    }
    f[0] = 1;
    f[1] = 0;
    EXPECT_EQ(*AucFromScores(s, f), MannWhitney(s, f)) << t;
  }
}

TEST(Roc, CurvesAreMonotoneWithEndpoints) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.UniformIndex(60);
    std::vector<double> s(n);
    std::vector<std::uint8_t> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.Normal();
      f[i] = i % 2;
    }
    auto roc = *BuildRoc(s, f);
    EXPECT_EQ(roc.points.front(), (RocPoint{0, 0}));
    EXPECT_EQ(roc.points.back(), (RocPoint{1, 1}));
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
      EXPECT_GE(roc.points[k].fpr, roc.points[k - 1].fpr);
      EXPECT_GE(roc.points[k].tpr, roc.points[k - 1].tpr);
    }
  }
}

TEST(Roc, InvertedScoresMirrorAuc) {
  Rng rng(8);
  std::vector<double> s(40), neg(40);
  std::vector<std::uint8_t> f(40);
  for (std::size_t i = 0; i < 40; ++i) {
    s[i] = rng.Uniform();
    neg[i] = -s[i];
    f[i] = i < 20;
  }
  EXPECT_NEAR(*AucFromScores(s, f) + *AucFromScores(neg, f), 1.0, 1e-15);
}

TEST(Interpolate, LinearAndVerticalSegments) {
  RocCurve c;
  c.points = {{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}};
  EXPECT_EQ(InterpolateTpr(c, 0.0), 0.5);
  EXPECT_EQ(InterpolateTpr(c, 0.25), 0.5);
  EXPECT_EQ(InterpolateTpr(c, 0.5), 1.0);
  RocCurve d;
  d.points = {{0, 0}, {1, 1}};
  EXPECT_NEAR(InterpolateTpr(d, 0.3), 0.3, 1e-15);
}

TEST(MeanRoc, GridShape) {
  const auto g = UniformGrid();
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[37], 0.37, 1e-15);
}

TEST(MeanRoc, DiagonalAndOracleAverage) {
  RocCurve diag, oracle;
  diag.points = {{0, 0}, {1, 1}};
  oracle.points = {{0, 0}, {0, 1}, {1, 1}};
  const std::vector<RocCurve> curves = {diag, oracle};
  const auto grid = UniformGrid();
  auto m = *MeanRoc(curves, grid);
  ASSERT_EQ(m.points.size(), grid.size());
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    EXPECT_NEAR(m.points[k].tpr, (grid[k] + 1) / 2, 1e-15);
    EXPECT_EQ(m.points[k].fpr, grid[k]);
  }
  EXPECT_EQ(m.points.front(), (RocPoint{0, 0}));
  EXPECT_EQ(m.points.back(), (RocPoint{1, 1}));
}

TEST(MeanRoc, IdenticalCurvesGiveTheCurve) {
  const std::vector<double> s = {0.9, 0.4, 0.6, 0.3, 0.55, 0.1};
  const std::vector<std::uint8_t> f = {1, 1, 0, 0, 1, 0};
  const RocCurve c = *BuildRoc(s, f);
  const auto grid = UniformGrid(11);
  const RocCurve one = Resample(c, grid);
  const std::vector<RocCurve> three = {c, c, c};
  auto m = *MeanRoc(three, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(m.points[k].tpr, one.points[k].tpr, 1e-15);
  }
  auto single = *MeanRoc(std::vector<RocCurve>{c}, grid);
  EXPECT_EQ(single.points, one.points);
}

TEST(MeanRoc, AllDiagonalIsDiagonal) {
  RocCurve diag;
  diag.points = {{0, 0}, {1, 1}};
  const auto grid = UniformGrid();
  auto m = *MeanRoc(std::vector<RocCurve>(4, diag), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(m.points[k].tpr, grid[k], 1e-15);
  }
}

TEST(MeanRoc, EmptyInputIsAnError) {
  EXPECT_FALSE(MeanRoc(std::vector<RocCurve>{}, UniformGrid()).ok());
}

TEST(Phi, AccuracyHeldWithAucDropHitsCap) {
  EXPECT_EQ(**Phi(0.7, 0.6, 0.8, 0.8, 10), 2.0);
  EXPECT_EQ(**Phi(0.7, 0.6, 0.8, 0.85, 10), 2.0);
}

TEST(Phi, SymmetricFullCollapseIsOne) {
  EXPECT_EQ(**Phi(0.7, 0.5, 0.8, 0.1, 10), 1.0);
}

TEST(Phi, EqualRelativeDropsIsOne) {
  // 0.05 * 0.8 over 0.4 * 0.1; the operands are not exact in binary, so the
  // quotient lands one unit in the 15th digit below 1.
  EXPECT_NEAR(**Phi(0.6, 0.55, 0.9, 0.5, 10), 1.0, 1e-12);
}

TEST(Phi, NumeratorZeroGivesZero) {
  EXPECT_EQ(**Phi(0.7, 0.7, 0.8, 0.5, 10), 0.0);
  EXPECT_EQ(**Phi(0.7, 0.75, 0.8, 0.5, 10), 0.0);
}

TEST(Phi, NotApplicableWithoutPrivacyGap) {
  EXPECT_FALSE(Phi(0.5, 0.5, 0.8, 0.5, 10)->has_value());
  EXPECT_FALSE(Phi(0.45, 0.5, 0.8, 0.5, 10)->has_value());
  EXPECT_FALSE(Phi(0.7, 0.5, 0.1, 0.1, 10)->has_value());
  EXPECT_EQ(FormatPhi(std::nullopt), "n/a");
  EXPECT_EQ(FormatPhi(0.25), "0.25");
}

TEST(Phi, RejectsBadInputs) {
  EXPECT_FALSE(Phi(1.2, 0.5, 0.8, 0.5, 10).ok());
  EXPECT_FALSE(Phi(0.7, -0.1, 0.8, 0.5, 10).ok());
  EXPECT_FALSE(Phi(0.7, 0.5, 0.8, std::nan(""), 10).ok());
  EXPECT_FALSE(Phi(0.7, 0.5, 0.8, 0.5, 1).ok());
}

TEST(Phi, BoundedAndMonotone) {
  Rng rng(99);
  for (int t = 0; t < 2000; ++t) {
    const int c = 2 + static_cast<int>(rng.UniformIndex(20));
    const double auc_o = 0.5 + 0.5 * rng.Uniform() + 1e-9;
    const double acc_o = 1.0 / c + (1 - 1.0 / c) * rng.Uniform() + 1e-9;
    if (auc_o > 1 || acc_o > 1) continue;
    const double auc_e = rng.Uniform();
    const double acc_e = rng.Uniform();
    const double v = **Phi(auc_o, auc_e, acc_o, acc_e, c);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0);
    // Bigger AUC drop: never smaller. Bigger accuracy drop: never larger.
    const double auc_lower = auc_e * 0.9;
    EXPECT_GE(**Phi(auc_o, auc_lower, acc_o, acc_e, c), v);
    const double acc_lower = acc_e * 0.9;
    if (acc_e < acc_o) {
      EXPECT_LE(**Phi(auc_o, auc_e, acc_o, acc_lower, c), v);
    }
  }
}

}  // namespace
}  // namespace dpmi::metrics
