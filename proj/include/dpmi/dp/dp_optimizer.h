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

#ifndef DPMI_DP_DP_OPTIMIZER_H_
#define DPMI_DP_DP_OPTIMIZER_H_

#include <cstddef>
#include <limits>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"
#include "dpmi/common/rng.h"
#include "dpmi/data/dataset.h"
#include "dpmi/nn/network.h"
#include "dpmi/nn/optimizer.h"
#include "dpmi/nn/trainer.h"

namespace dpmi::dp {

inline constexpr double kNoClipping = std::numeric_limits<double>::infinity();

struct CdpParams {
  // Per-example L2 bound; kNoClipping disables clipping (only valid with
  // z = 0, since the noise scale would be unbounded).
  double clip_norm = 4.0;
  double noise_multiplier = 0.0;
  // Target delta; 0 means 1/n for the training set at hand.
  double delta = 0.0;

  // sigma = z * C (0 when z = 0, also with clipping disabled).
  double sigma() const {
    return noise_multiplier == 0.0 ? 0.0 : noise_multiplier * clip_norm;
  }
  bool clipping_enabled() const { return clip_norm != kNoClipping; }
  absl::Status Validate() const;
};

// g <- g * min(1, C / ||g||_2) in place. Returns the norm before clipping.
double ClipPerExample(std::span<double> grad, double clip_norm);

// One private update from a lot of per-example gradients (one row each):
// clip every row, sum in row order, add N(0, sigma^2) per coordinate, divide
// by the lot size, and hand the result to the optimizer. Noise is drawn from
// `noise_rng` only when sigma > 0.
absl::Status DpStep(nn::Network& net, nn::OptimizerState& state,
                    Matrix& per_example_grads, const CdpParams& params,
                    Rng& noise_rng);

struct DpFitResult {
  nn::TrainReport report;
  double epsilon = 0.0;
  double delta = 0.0;
  double sampling_ratio = 0.0;
};

// Trains with DpStep per lot (lot size = config.batch_size) and accounts
// every step with the RDP accountant. Noise is drawn from a stream forked
// from config.seed, independent of the lot-shuffling stream.
absl::StatusOr<DpFitResult> DpFit(nn::Network& net, const data::Dataset& train,
                                  const data::Dataset& test,
                                  const CdpParams& params,
                                  const nn::TrainConfig& config);

// Epsilon a DpFit run with these settings reports for `steps` steps.
absl::StatusOr<double> DpFitEpsilon(std::size_t n, std::size_t lot,
                                    std::size_t steps, const CdpParams& params);

}  // namespace dpmi::dp

#endif  // DPMI_DP_DP_OPTIMIZER_H_
