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

#ifndef DPMI_NN_TRAINER_H_
#define DPMI_NN_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/rng.h"
#include "dpmi/data/dataset.h"
#include "dpmi/nn/network.h"
#include "dpmi/nn/optimizer.h"

namespace dpmi::nn {

struct TrainConfig {
  OptimizerConfig optimizer;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 200;
  // Stop once the test loss has not improved by more than `tolerance` for
  // `patience` consecutive epochs (patience 0 behaves like 1).
  bool early_stopping = true;
  std::size_t patience = 10;
  double tolerance = 1e-4;
  // Drives mini-batch order only; network initialization is the caller's.
  std::uint64_t seed = 0;
};

struct EpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

enum class StopReason { kEarlyStop, kMaxEpochs };

std::string_view StopReasonName(StopReason reason);

struct TrainReport {
  std::vector<EpochStats> epochs;
  // Number of completed epochs.
  std::size_t stop_epoch = 0;
  StopReason stop_reason = StopReason::kMaxEpochs;
  // Total optimizer steps taken.
  std::size_t steps = 0;
};

// Result of one mini-batch step as seen by the training loop.
struct BatchOutcome {
  double loss_sum = 0.0;
  std::size_t correct = 0;
};

// Computes and applies one update for the examples `batch` (indices into
// `train`). Used to plug the differentially private step into the shared
// training loop.
using BatchStepFn = std::function<absl::StatusOr<BatchOutcome>(
    Network& net, const data::Dataset& train,
    std::span<const std::size_t> batch)>;

// Mini-batch loop shared by Fit and the private trainer: reshuffles every
// epoch with an Rng seeded from config.seed, keeps the last partial batch,
// evaluates the test split after every epoch for early stopping, and aborts
// with diagnostics on a non-finite loss or parameter.
absl::StatusOr<TrainReport> RunTrainingLoop(Network& net,
                                            const data::Dataset& train,
                                            const data::Dataset& test,
                                            const TrainConfig& config,
                                            const BatchStepFn& step);

// Sums the per-example gradients of `batch` in batch order into `sum`
// (resized to num_params). Returns loss sum and correct-prediction count.
BatchOutcome SumBatchGradients(const Network& net, const data::Dataset& train,
                               std::span<const std::size_t> batch,
                               std::vector<double>& sum);

// Non-private training with the configured optimizer on the mean gradient.
absl::StatusOr<TrainReport> Fit(Network& net, const data::Dataset& train,
                                const data::Dataset& test,
                                const TrainConfig& config);

absl::StatusOr<double> EvaluateAccuracy(const Network& net,
                                        const data::Dataset& data);
// Mean cross-entropy.
absl::StatusOr<double> EvaluateLoss(const Network& net,
                                    const data::Dataset& data);

}  // namespace dpmi::nn

#endif  // DPMI_NN_TRAINER_H_
