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

#ifndef DPMI_MI_TRAINING_H_
#define DPMI_MI_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"
#include "dpmi/data/splits.h"
#include "dpmi/dp/privacy_spec.h"
#include "dpmi/nn/network.h"
#include "dpmi/nn/trainer.h"

namespace dpmi::mi {

struct ModelConfig {
  std::vector<std::size_t> hidden = {128};
  // train.seed is ignored; every model derives its own from the job seed.
  nn::TrainConfig train;
};

struct TrainedModel {
  nn::Network net;
  nn::TrainReport report;
  // Composed local budget (ldp), accounted epsilon (cdp) or infinity (none).
  double epsilon = 0.0;
  double delta = 0.0;
  // Hash of the records the optimizer consumed (perturbed ones under ldp).
  std::uint64_t train_input_hash = 0;
  std::uint64_t seed = 0;
};

// Trains one model on `train` under `privacy`, using `test` for early
// stopping. The seed drives initialization, lot order, perturbation and
// noise through separate derived streams.
absl::StatusOr<TrainedModel> TrainUnderPrivacy(const data::Dataset& train,
                                               const data::Dataset& test,
                                               const ModelConfig& config,
                                               const dp::PrivacySpec& privacy,
                                               std::uint64_t seed);

// Seed of shadow i for a job seed.
std::uint64_t ShadowSeed(std::uint64_t job_seed, std::size_t shadow);

// Trains one shadow per layout pair with the target's configuration and
// privacy parameters. Shadows are independent; up to `jobs` train at once.
// The result order follows the layout regardless of scheduling.
absl::StatusOr<std::vector<TrainedModel>> TrainShadows(
    const data::Dataset& dataset, const data::AttackDataLayout& layout,
    const ModelConfig& config, const dp::PrivacySpec& privacy,
    std::uint64_t job_seed, std::size_t jobs = 1);

}  // namespace dpmi::mi

#endif  // DPMI_MI_TRAINING_H_
