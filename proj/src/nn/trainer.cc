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

#include "dpmi/nn/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "absl/strings/str_cat.h"
#include "dpmi/kernels/kernels.h"
#include "dpmi/nn/backprop.h"

namespace dpmi::nn {
namespace {

struct SplitStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

SplitStats Evaluate(const Network& net, const data::Dataset& data) {
  ExampleWorkspace ws(net);
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ws.Forward(net, data.features.row(i));
    loss += CrossEntropy(ws.softmax(), data.labels[i]);
    if (Argmax(ws.softmax()) == static_cast<std::size_t>(data.labels[i])) {
      ++correct;
    }
  }
  const double n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

absl::Status CheckSplit(const Network& net, const data::Dataset& d,
                        std::string_view name) {
  if (d.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(std::string(name), " split is empty"));
  }
  for (std::size_t i = 0; i < d.features.rows(); ++i) {
    for (double v : d.features.row(i)) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            std::string(name), " record ", i, " has a non-finite feature"));
      }
    }
  }
  return CheckBatch(net, d.features, d.labels);
}

}  // namespace

std::string_view StopReasonName(StopReason reason) {
  return reason == StopReason::kEarlyStop ? "early-stop" : "max-epochs";
}

BatchOutcome SumBatchGradients(const Network& net, const data::Dataset& train,
                               std::span<const std::size_t> batch,
                               std::vector<double>& sum) {
  const kernels::KernelTable& kt = kernels::Active();
  sum.assign(net.num_params(), 0.0);
  std::vector<double> example(net.num_params());
  ExampleWorkspace ws(net);
  BatchOutcome outcome;
  for (std::size_t idx : batch) {
    const int label = train.labels[idx];
    outcome.loss_sum += ws.Backprop(net, train.features.row(idx), label, example);
    if (Argmax(ws.softmax()) == static_cast<std::size_t>(label)) {
      ++outcome.correct;
    }
    kt.axpy(1.0, example.data(), sum.data(), sum.size());
  }
  return outcome;
}

absl::StatusOr<TrainReport> RunTrainingLoop(Network& net,
                                            const data::Dataset& train,
                                            const data::Dataset& test,
                                            const TrainConfig& config,
                                            const BatchStepFn& step) {
  if (absl::Status s = CheckSplit(net, train, "train"); !s.ok()) return s;
  if (absl::Status s = CheckSplit(net, test, "test"); !s.ok()) return s;
  if (config.batch_size == 0) {
    return absl::InvalidArgumentError("batch_size must be positive");
  }

  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  double best_test_loss = std::numeric_limits<double>::infinity();
  std::size_t stale_epochs = 0;
  const std::size_t patience = std::max<std::size_t>(config.patience, 1);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.Shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start,
                                               end - start);
      auto outcome = step(net, train, batch);
      if (!outcome.ok()) return outcome.status();
      ++report.steps;
      if (!std::isfinite(outcome->loss_sum)) {
        return absl::InternalError(absl::StrCat(
            "non-finite training loss at epoch ", epoch + 1, ", batch ",
            start / config.batch_size, " (step ", report.steps, ")"));
      }
      if (!net.AllFinite()) {
        return absl::InternalError(absl::StrCat(
            "non-finite parameter after epoch ", epoch + 1, ", batch ",
            start / config.batch_size, " (step ", report.steps, ")"));
      }
      loss_sum += outcome->loss_sum;
      correct += outcome->correct;
    }

    const SplitStats test_stats = Evaluate(net, test);
    const double n = static_cast<double>(train.size());
    report.epochs.push_back(
        {loss_sum / n, static_cast<double>(correct) / n, test_stats.loss,
         test_stats.accuracy});
    report.stop_epoch = epoch + 1;
    if (!std::isfinite(test_stats.loss)) {
      return absl::InternalError(
          absl::StrCat("non-finite test loss at epoch ", epoch + 1));
    }

    if (config.early_stopping) {
      if (test_stats.loss < best_test_loss - config.tolerance) {
        best_test_loss = test_stats.loss;
        stale_epochs = 0;
      } else if (++stale_epochs >= patience) {
        report.stop_reason = StopReason::kEarlyStop;
        return report;
      }
    }
  }
  report.stop_reason = StopReason::kMaxEpochs;
  return report;
}

absl::StatusOr<TrainReport> Fit(Network& net, const data::Dataset& train,
                                const data::Dataset& test,
                                const TrainConfig& config) {
  OptimizerState state(config.optimizer, net.num_params());
  std::vector<double> grad;
  const BatchStepFn step =
      [&](Network& model, const data::Dataset& d,
          std::span<const std::size_t> batch) -> absl::StatusOr<BatchOutcome> {
    const BatchOutcome outcome = SumBatchGradients(model, d, batch, grad);
    kernels::Active().scale(1.0 / static_cast<double>(batch.size()),
                            grad.data(), grad.size());
    if (absl::Status s = OptimizerStep(model, state, grad); !s.ok()) return s;
    return outcome;
  };
  return RunTrainingLoop(net, train, test, config, step);
}

absl::StatusOr<double> EvaluateAccuracy(const Network& net,
                                        const data::Dataset& data) {
  if (absl::Status s = CheckSplit(net, data, "evaluation"); !s.ok()) return s;
  return Evaluate(net, data).accuracy;
}

absl::StatusOr<double> EvaluateLoss(const Network& net,
                                    const data::Dataset& data) {
  if (absl::Status s = CheckSplit(net, data, "evaluation"); !s.ok()) return s;
  return Evaluate(net, data).loss;
}

}  // namespace dpmi::nn
