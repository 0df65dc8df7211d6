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

#include "dpmi/dp/rdp_accountant.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace dpmi::dp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ln(e^a - e^b) for a >= b; rounding can make the difference vanish.
double LogSub(double a, double b) {
  if (b == kNegInf) return a;
  if (b >= a) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

// ln erfc(x), stable for large positive x where erfc underflows.
double LogErfc(double x) {
  if (x < 20.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  const double inv = 1.0 / (2.0 * x2);
  // erfc(x) ~ e^{-x^2} / (x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6))
  const double series = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv * inv * inv;
  return -x2 - std::log(x) - 0.5 * std::log(std::numbers::pi) +
         std::log(series);
}

bool IsInteger(double alpha) { return alpha == std::floor(alpha); }

double LogAInteger(double q, double z, int alpha) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double two_var = 2.0 * z * z;
  double log_a = kNegInf;
  double log_binom = 0.0;  // ln C(alpha, k)
  for (int k = 0; k <= alpha; ++k) {
    if (k > 0) {
      log_binom += std::log(static_cast<double>(alpha - k + 1)) -
                   std::log(static_cast<double>(k));
    }
    const double kk = static_cast<double>(k);
    double term = log_binom + kk * (kk - 1.0) / two_var + kk * log_q;
    if (alpha - k > 0) term += static_cast<double>(alpha - k) * log_1mq;
    log_a = LogAdd(log_a, term);
  }
  return log_a;
}

double LogAFractional(double q, double z, double alpha) {
  const double var = z * z;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double z0 = var * std::log(1.0 / q - 1.0) + 0.5;
  const double scale = std::numbers::sqrt2 * z;
  double log_a0 = kNegInf;
  double log_a1 = kNegInf;
  double log_coef = 0.0;  // ln |C(alpha, i)|
  bool positive = true;   // sign of C(alpha, i)
  for (int i = 0; i < 100000; ++i) {
    if (i > 0) {
      const double factor = alpha - (i - 1);
      log_coef += std::log(std::fabs(factor)) - std::log(static_cast<double>(i));
      if (factor < 0) positive = !positive;
    }
    const double fi = static_cast<double>(i);
    const double j = alpha - fi;
    const double log_t0 = log_coef + fi * log_q + j * log_1mq;
    const double log_t1 = log_coef + j * log_q + fi * log_1mq;
    const double log_e0 = std::log(0.5) + LogErfc((fi - z0) / scale);
    const double log_e1 = std::log(0.5) + LogErfc((z0 - j) / scale);
    const double log_s0 = log_t0 + (fi * fi - fi) / (2.0 * var) + log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2.0 * var) + log_e1;
    if (positive) {
      log_a0 = LogAdd(log_a0, log_s0);
      log_a1 = LogAdd(log_a1, log_s1);
    } else {
      log_a0 = LogSub(log_a0, log_s0);
      log_a1 = LogSub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30.0) break;
  }
  return LogAdd(log_a0, log_a1);
}

absl::Status CheckLedger(double q, double z) {
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling ratio must lie in (0, 1], got ", q));
  }
  if (!(z >= 0.0) || !std::isfinite(z)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise multiplier must be finite and >= 0, got ", z));
  }
  return absl::OkStatus();
}

}  // namespace

std::vector<double> IntegerOrders(int max_order) {
  std::vector<double> orders;
  for (int a = 2; a <= max_order; ++a) orders.push_back(a);
  return orders;
}

std::vector<double> DefaultOrders() {
  std::vector<double> orders;
  for (int t = 11; t < 110; ++t) orders.push_back(t / 10.0);
  for (int a = 11; a <= 256; ++a) orders.push_back(a);
  return orders;
}

absl::StatusOr<double> RdpSubsampledGaussian(double q, double z,
                                             double alpha) {
  if (absl::Status s = CheckLedger(q, z); !s.ok()) return s;
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order must be finite and > 1, got ", alpha));
  }
  if (z == 0.0) return kNoPrivacy;
  if (q == 1.0) return alpha / (2.0 * z * z);
  const double log_a = IsInteger(alpha)
                           ? LogAInteger(q, z, static_cast<int>(alpha))
                           : LogAFractional(q, z, alpha);
  return std::max(0.0, log_a / (alpha - 1.0));
}

absl::StatusOr<PrivacyGuarantee> EpsilonFromRdp(std::span<const double> orders,
                                                std::span<const double> rdp,
                                                double delta) {
  if (orders.empty()) return absl::InvalidArgumentError("order grid is empty");
  if (orders.size() != rdp.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(orders.size(), " orders but ", rdp.size(), " RDP values"));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0,1), got ", delta));
  }
  PrivacyGuarantee best;
  best.delta = delta;
  const double log_inv_delta = std::log(1.0 / delta);
  for (std::size_t j = 0; j < orders.size(); ++j) {
    if (IsNoPrivacy(rdp[j])) continue;
    const double eps = rdp[j] + log_inv_delta / (orders[j] - 1.0);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.order = orders[j];
    }
  }
  return best;
}

absl::StatusOr<RdpAccountant> RdpAccountant::Create(double q, double z,
                                                    std::vector<double> orders) {
  if (orders.empty()) return absl::InvalidArgumentError("order grid is empty");
  std::vector<double> per_step;
  per_step.reserve(orders.size());
  for (double alpha : orders) {
    auto r = RdpSubsampledGaussian(q, z, alpha);
    if (!r.ok()) return r.status();
    per_step.push_back(*r);
  }
  return RdpAccountant(q, z, std::move(orders), std::move(per_step));
}

void RdpAccountant::Compose(std::size_t steps) { steps_ += steps; }

std::vector<double> RdpAccountant::rdp() const {
  std::vector<double> total(per_step_.size());
  const double t = static_cast<double>(steps_);
  for (std::size_t j = 0; j < per_step_.size(); ++j) {
    // 0 * inf stays 0: no steps, no loss.
    total[j] = steps_ == 0 ? 0.0 : t * per_step_[j];
  }
  return total;
}

absl::StatusOr<PrivacyGuarantee> RdpAccountant::GetPrivacy(double delta) const {
  const std::vector<double> total = rdp();
  return EpsilonFromRdp(orders_, total, delta);
}

absl::StatusOr<double> AccountTraining(double q, double z, std::size_t steps,
                                       double delta,
                                       std::span<const double> orders) {
  auto acc = RdpAccountant::Create(
      q, z, std::vector<double>(orders.begin(), orders.end()));
  if (!acc.ok()) return acc.status();
  acc->Compose(steps);
  auto guarantee = acc->GetPrivacy(delta);
  if (!guarantee.ok()) return guarantee.status();
  return guarantee->epsilon;
}

absl::StatusOr<double> AccountTraining(double q, double z, std::size_t steps,
                                       double delta) {
  const std::vector<double> orders = DefaultOrders();
  return AccountTraining(q, z, steps, delta, orders);
}

std::size_t StepsForEpochs(std::size_t n, std::size_t lot, std::size_t epochs) {
  if (lot == 0) return 0;
  return epochs * ((n + lot - 1) / lot);
}

}  // namespace dpmi::dp
