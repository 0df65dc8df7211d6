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
#include <vector>

#include "dpmi/dp/rdp_accountant.h"
#include "gtest/gtest.h"

namespace dpmi::dp {
namespace {

// Renyi divergence D_a(mu || mu0) of the sampled Gaussian mixture
// mu = (1-q) N(0, z^2) + q N(1, z^2) from mu0 = N(0, z^2), by composite
// Simpson quadrature of  int mu0(x) (mu(x)/mu0(x))^a dx.
double QuadratureRdp(double q, double z, double alpha) {
  const double lo = -40.0 * z - 10.0;
  const double hi = 40.0 * z + alpha + 10.0;
  const int n = 400000;  // even
  const double h = (hi - lo) / n;
  const double log_norm = -std::log(z * std::sqrt(2.0 * M_PI));
  // Log space: the ratio term overflows in the right tail for large orders.
  auto f = [&](double x) {
    const double log_ratio =
        std::log((1 - q) + q * std::exp((2 * x - 1) / (2 * z * z)));
    return std::exp(log_norm - x * x / (2 * z * z) + alpha * log_ratio);
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return std::log(sum * h / 3.0) / (alpha - 1.0);
}

TEST(Rdp, MatchesQuadratureOracleAtSpecPoint) {
  const double got = *RdpSubsampledGaussian(0.01, 4.0, 2.0);
  const double want = QuadratureRdp(0.01, 4.0, 2.0);
  EXPECT_NEAR(got, want, 0.05 * want);
  EXPECT_NEAR(got, want, 1e-6 * want);
}

TEST(Rdp, MatchesQuadratureOracleAcrossOrders) {
  for (double q : {0.01, 0.05, 0.3}) {
    for (double z : {1.0, 2.0, 4.0}) {
      for (double alpha : {1.5, 2.0, 2.5, 3.0, 5.0, 7.3, 8.0, 16.0}) {
        const double want = QuadratureRdp(q, z, alpha);
        EXPECT_NEAR(*RdpSubsampledGaussian(q, z, alpha), want, 1e-6 * want)
            << "q=" << q << " z=" << z << " alpha=" << alpha;
      }
    }
  }
}

TEST(Rdp, FullBatchIsClosedForm) {
  EXPECT_DOUBLE_EQ(*RdpSubsampledGaussian(1.0, 2.0, 8.0), 1.0);
  EXPECT_DOUBLE_EQ(*RdpSubsampledGaussian(1.0, 3.0, 2.5), 2.5 / 18.0);
}

TEST(Rdp, VanishesWithSamplingRatio) {
  double prev = *RdpSubsampledGaussian(0.1, 1.0, 4.0);
  for (double q : {1e-2, 1e-3, 1e-4, 1e-6}) {
    const double v = *RdpSubsampledGaussian(q, 1.0, 4.0);
    EXPECT_LT(v, prev);
    EXPECT_GE(v, 0.0);
    prev = v;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Rdp, ZeroNoiseIsNoPrivacy) {
  EXPECT_TRUE(IsNoPrivacy(*RdpSubsampledGaussian(0.1, 0.0, 2.0)));
  EXPECT_TRUE(IsNoPrivacy(*AccountTraining(0.1, 0.0, 10, 1e-5)));
}

TEST(Rdp, RejectsBadInputs) {
  EXPECT_FALSE(RdpSubsampledGaussian(0.0, 1.0, 2.0).ok());
  EXPECT_FALSE(RdpSubsampledGaussian(1.5, 1.0, 2.0).ok());
  EXPECT_FALSE(RdpSubsampledGaussian(0.5, -1.0, 2.0).ok());
  EXPECT_FALSE(RdpSubsampledGaussian(0.5, 1.0, 1.0).ok());
  EXPECT_FALSE(AccountTraining(0.5, 1.0, 10, 1e-5, std::vector<double>{}).ok());
  EXPECT_FALSE(AccountTraining(0.5, 1.0, 10, 0.0).ok());
}

TEST(Rdp, OrderGrids) {
  const auto ints = IntegerOrders();
  ASSERT_EQ(ints.size(), 255u);
  EXPECT_EQ(ints.front(), 2.0);
  EXPECT_EQ(ints.back(), 256.0);
  const auto def = DefaultOrders();
  EXPECT_NEAR(def.front(), 1.1, 1e-12);
  EXPECT_EQ(def.back(), 256.0);
  for (std::size_t i = 1; i < def.size(); ++i) EXPECT_LT(def[i - 1], def[i]);
}

TEST(Accountant, GridMinimizationOracle) {
  // q = 1 and z^2 = 46.95 / 2 give RDP(a) = a / 46.95.
  const double z = std::sqrt(46.95 / 2.0);
  const double delta = 1e-5;
  double want = std::numeric_limits<double>::infinity();
  for (double a : IntegerOrders()) {
    want = std::min(want, a / 46.95 + std::log(1 / delta) / (a - 1));
  }
  const double got = *AccountTraining(1.0, z, 1, delta, IntegerOrders());
  EXPECT_NEAR(got, want, 1e-12);
  EXPECT_NEAR(got, 1.01, 0.01);
}

TEST(Accountant, TableAnchorAtHalfNoise) {
  const double q = 128.0 / 8000.0;
  const double eps = *AccountTraining(q, 0.5, 12500, 1.0 / 8000.0);
  EXPECT_NEAR(eps, 88.1, 0.3 * 88.1);
}

TEST(Accountant, MonotoneInEveryArgument) {
  const double q = 128.0 / 8000.0, delta = 1.0 / 8000.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double z : {0.5, 2.0, 4.0, 6.0, 8.0, 16.0}) {
    const double e = *AccountTraining(q, z, 12500, delta);
    EXPECT_LT(e, prev) << z;
    prev = e;
  }
  EXPECT_GT(*AccountTraining(q, 2.0, 2000, delta), *AccountTraining(q, 2.0, 1000, delta));
  EXPECT_GT(*AccountTraining(0.05, 2.0, 1000, delta), *AccountTraining(q, 2.0, 1000, delta));
  EXPECT_LT(*AccountTraining(q, 2.0, 1000, 1e-3), *AccountTraining(q, 2.0, 1000, 1e-6));
}

TEST(Accountant, LedgerComposesLinearly) {
  auto acc = *RdpAccountant::Create(0.02, 1.5, IntegerOrders(32));
  acc.Compose(10);
  const auto ten = acc.rdp();
  acc.Compose(10);
  const auto twenty = acc.rdp();
  EXPECT_EQ(acc.steps(), 20u);
  for (std::size_t i = 0; i < ten.size(); ++i) {
    EXPECT_GE(ten[i], 0.0);
    EXPECT_NEAR(twenty[i], 2.0 * ten[i], 1e-12 * (1 + twenty[i]));
  }
  auto g = *acc.GetPrivacy(1e-5);
  EXPECT_NEAR(g.epsilon, *AccountTraining(0.02, 1.5, 20, 1e-5, IntegerOrders(32)), 1e-12);
  EXPECT_GE(g.order, 2.0);
}

TEST(Accountant, EpsilonFromRdpSkipsInfiniteOrders) {
  const std::vector<double> orders = {2, 3, 4};
  const std::vector<double> rdp = {kNoPrivacy, 0.5, kNoPrivacy};
  auto g = *EpsilonFromRdp(orders, rdp, 1e-5);
  EXPECT_EQ(g.order, 3.0);
  EXPECT_NEAR(g.epsilon, 0.5 + std::log(1e5) / 2.0, 1e-12);
}

TEST(Accountant, StepsForEpochsCountsPartialLots) {
  EXPECT_EQ(StepsForEpochs(8000, 128, 200), 12600u);
  EXPECT_EQ(StepsForEpochs(100, 10, 3), 30u);
  EXPECT_EQ(StepsForEpochs(101, 10, 3), 33u);
}

}  // namespace
}  // namespace dpmi::dp
