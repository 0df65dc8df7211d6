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

#ifndef DPMI_NN_OPTIMIZER_H_
#define DPMI_NN_OPTIMIZER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/nn/network.h"

namespace dpmi::nn {

enum class OptimizerKind { kSgd, kAdam };

std::string_view OptimizerKindName(OptimizerKind kind);
absl::StatusOr<OptimizerKind> ParseOptimizerKind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

// Optimizer state for one network. Adam keeps first/second moment
// accumulators shaped like the parameter vector.
class OptimizerState {
 public:
  OptimizerState(const OptimizerConfig& config, std::size_t num_params);

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t step() const { return step_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

  // theta <- theta - lr * g (SGD) or the bias-corrected Adam update.
  // Increments the step counter.
  absl::Status Apply(std::span<double> params, std::span<const double> grad);

 private:
  OptimizerConfig config_;
  std::uint64_t step_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

absl::Status OptimizerStep(Network& net, OptimizerState& state,
                           std::span<const double> grad);

}  // namespace dpmi::nn

#endif  // DPMI_NN_OPTIMIZER_H_
