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

#include "dpmi/dp/dp_optimizer.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "dpmi/dp/rdp_accountant.h"
#include "dpmi/kernels/kernels.h"
#include "dpmi/nn/backprop.h"

namespace dpmi::dp {
namespace {

// Stream id for the noise generator, kept apart from the shuffling stream.
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

}  // namespace

absl::Status CdpParams::Validate() const {
  if (!(clip_norm > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clipping norm must be positive, got ", clip_norm));
  }
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise multiplier must be finite and >= 0, got ", noise_multiplier));
  }
  if (noise_multiplier > 0.0 && !clipping_enabled()) {
    return absl::InvalidArgumentError(
        "noise needs a finite clipping norm (sigma = z * C)");
  }
  if (delta != 0.0 && !(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0,1), got ", delta));
  }
  return absl::OkStatus();
}

double ClipPerExample(std::span<double> grad, double clip_norm) {
  const double norm = std::sqrt(kernels::SumSquares(grad));
  if (norm > clip_norm) {
    kernels::Scale(clip_norm / norm, grad);
  }
  return norm;
}

absl::Status DpStep(nn::Network& net, nn::OptimizerState& state,
                    Matrix& per_example_grads, const CdpParams& params,
                    Rng& noise_rng) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (per_example_grads.rows() == 0) {
    return absl::InvalidArgumentError("lot is empty");
  }
  if (per_example_grads.cols() != net.num_params()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "gradient width ", per_example_grads.cols(), " does not match ",
        net.num_params(), " parameters"));
  }
  for (double v : per_example_grads.values()) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("non-finite per-example gradient");
    }
  }
  const kernels::KernelTable& kt = kernels::Active();
  std::vector<double> sum(net.num_params(), 0.0);
  for (std::size_t i = 0; i < per_example_grads.rows(); ++i) {
    std::span<double> g = per_example_grads.row(i);
    if (params.clipping_enabled()) ClipPerExample(g, params.clip_norm);
    kt.axpy(1.0, g.data(), sum.data(), sum.size());
  }
  const double sigma = params.sigma();
  if (sigma > 0.0) {
    for (double& v : sum) v += noise_rng.Normal(0.0, sigma);
  }
  kt.scale(1.0 / static_cast<double>(per_example_grads.rows()), sum.data(),
           sum.size());
  return nn::OptimizerStep(net, state, sum);
}

absl::StatusOr<double> DpFitEpsilon(std::size_t n, std::size_t lot,
                                    std::size_t steps,
                                    const CdpParams& params) {
  if (n == 0 || lot == 0) {
    return absl::InvalidArgumentError("record count and lot size must be > 0");
  }
  const double q = std::min(1.0, static_cast<double>(lot) / n);
  const double delta =
      params.delta > 0.0 ? params.delta : 1.0 / static_cast<double>(n);
  return AccountTraining(q, params.noise_multiplier, steps, delta);
}

absl::StatusOr<DpFitResult> DpFit(nn::Network& net, const data::Dataset& train,
                                  const data::Dataset& test,
                                  const CdpParams& params,
                                  const nn::TrainConfig& config) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (train.empty()) return absl::InvalidArgumentError("train split is empty");
  if (params.delta == 0.0 && train.size() < 2) {
    return absl::InvalidArgumentError("delta = 1/n needs at least 2 records");
  }

  nn::OptimizerState state(config.optimizer, net.num_params());
  Rng noise_rng = Rng(config.seed).Fork(kNoiseStream);
  Matrix lot_grads;
  const nn::BatchStepFn step =
      [&](nn::Network& model, const data::Dataset& d,
          std::span<const std::size_t> batch)
      -> absl::StatusOr<nn::BatchOutcome> {
    lot_grads = Matrix(batch.size(), model.num_params());
    nn::ExampleWorkspace ws(model);
    nn::BatchOutcome outcome;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int label = d.labels[batch[i]];
      outcome.loss_sum +=
          ws.Backprop(model, d.features.row(batch[i]), label, lot_grads.row(i));
      if (nn::Argmax(ws.softmax()) == static_cast<std::size_t>(label)) {
        ++outcome.correct;
      }
    }
    if (absl::Status s = DpStep(model, state, lot_grads, params, noise_rng);
        !s.ok()) {
      return s;
    }
    return outcome;
  };

  auto report = nn::RunTrainingLoop(net, train, test, config, step);
  if (!report.ok()) return report.status();

  DpFitResult result;
  result.sampling_ratio =
      std::min(1.0, static_cast<double>(config.batch_size) / train.size());
  result.delta = params.delta > 0.0 ? params.delta : 1.0 / train.size();
  auto eps = DpFitEpsilon(train.size(), config.batch_size, report->steps,
                          params);
  if (!eps.ok()) return eps.status();
  result.epsilon = *eps;
  result.report = *std::move(report);
  return result;
}

}  // namespace dpmi::dp
