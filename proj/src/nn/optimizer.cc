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

#include "dpmi/nn/optimizer.h"

#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"
#include "dpmi/kernels/kernels.h"

namespace dpmi::nn {

std::string_view OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

absl::StatusOr<OptimizerKind> ParseOptimizerKind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown optimizer '", std::string(name), "' (expected sgd or adam)"));
}

OptimizerState::OptimizerState(const OptimizerConfig& config,
                               std::size_t num_params)
    : config_(config) {
  if (config_.kind == OptimizerKind::kAdam) {
    m_.assign(num_params, 0.0);
    v_.assign(num_params, 0.0);
  }
}

absl::Status OptimizerState::Apply(std::span<double> params,
                                   std::span<const double> grad) {
  if (params.size() != grad.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("shape mismatch: ", params.size(), " parameters but ",
                     grad.size(), " gradient entries"));
  }
  const kernels::KernelTable& kt = kernels::Active();
  ++step_;
  if (config_.kind == OptimizerKind::kSgd) {
    kt.axpy(-config_.learning_rate, grad.data(), params.data(), params.size());
    return absl::OkStatus();
  }
  if (m_.size() != params.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("shape mismatch: optimizer state holds ", m_.size(),
                     " moments for ", params.size(), " parameters"));
  }
  const double t = static_cast<double>(step_);
  const kernels::AdamCoefficients coeffs{
      config_.learning_rate,
      config_.beta1,
      config_.beta2,
      config_.epsilon,
      1.0 - std::pow(config_.beta1, t),
      1.0 - std::pow(config_.beta2, t),
  };
  kt.adam_update(params.data(), m_.data(), v_.data(), grad.data(),
                 params.size(), coeffs);
  return absl::OkStatus();
}

absl::Status OptimizerStep(Network& net, OptimizerState& state,
                           std::span<const double> grad) {
  return state.Apply(net.params(), grad);
}

}  // namespace dpmi::nn
