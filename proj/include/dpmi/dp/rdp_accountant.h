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

// Renyi-DP accounting for the sampled Gaussian mechanism.
//
// For integer orders the per-step bound is
//
//   RDP(a) = 1/(a-1) * ln sum_{k=0..a} C(a,k) (1-q)^(a-k) q^k e^{k(k-1)/(2z^2)}
//
// Fractional orders use the two-sided series of the same mixture divergence
// (the expansion used by the TensorFlow Privacy accountant), which lets the
// conversion search orders below 2. The conversion to (eps, delta) is
//
//   eps = min_a [ T * RDP(a) + ln(1/delta) / (a-1) ].

#ifndef DPMI_DP_RDP_ACCOUNTANT_H_
#define DPMI_DP_RDP_ACCOUNTANT_H_

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpmi::dp {

// RDP of a mechanism without noise (z = 0). Any epsilon derived from it is
// also this value.
inline constexpr double kNoPrivacy = std::numeric_limits<double>::infinity();

inline bool IsNoPrivacy(double value) { return std::isinf(value); }

// Integers 2..max_order.
std::vector<double> IntegerOrders(int max_order = 256);
// 1.1, 1.2, ..., 10.9 followed by the integers 11..256.
std::vector<double> DefaultOrders();

// Per-step RDP at order `alpha` (> 1) for sampling ratio q in (0,1] and noise
// multiplier z >= 0. Integer orders use the binomial sum above.
absl::StatusOr<double> RdpSubsampledGaussian(double q, double z, double alpha);

struct PrivacyGuarantee {
  double epsilon = kNoPrivacy;
  double delta = 0.0;
  // Order at which the minimum was attained (0 when no privacy).
  double order = 0.0;
};

// Converts accumulated RDP values (one per order) to (eps, delta).
absl::StatusOr<PrivacyGuarantee> EpsilonFromRdp(std::span<const double> orders,
                                                std::span<const double> rdp,
                                                double delta);

// Running ledger of one training job. Each Compose call adds `steps`
// applications of the sampled Gaussian with the ledger's (q, z).
class RdpAccountant {
 public:
  static absl::StatusOr<RdpAccountant> Create(
      double q, double z, std::vector<double> orders = DefaultOrders());

  void Compose(std::size_t steps = 1);

  double sampling_ratio() const { return q_; }
  double noise_multiplier() const { return z_; }
  std::size_t steps() const { return steps_; }
  std::span<const double> orders() const { return orders_; }
  // Accumulated RDP per order.
  std::vector<double> rdp() const;

  absl::StatusOr<PrivacyGuarantee> GetPrivacy(double delta) const;

 private:
  RdpAccountant(double q, double z, std::vector<double> orders,
                std::vector<double> per_step)
      : q_(q), z_(z), orders_(std::move(orders)), per_step_(std::move(per_step)) {}

  double q_;
  double z_;
  std::size_t steps_ = 0;
  std::vector<double> orders_;
  std::vector<double> per_step_;
};

// One-shot query: eps after `steps` steps at sampling ratio q.
absl::StatusOr<double> AccountTraining(
    double q, double z, std::size_t steps, double delta,
    std::span<const double> orders);
absl::StatusOr<double> AccountTraining(double q, double z, std::size_t steps,
                                       double delta);

// Steps taken by `epochs` passes over n records with lots of size `lot`
// (the last partial lot counts as a step).
std::size_t StepsForEpochs(std::size_t n, std::size_t lot, std::size_t epochs);

}  // namespace dpmi::dp

#endif  // DPMI_DP_RDP_ACCOUNTANT_H_
