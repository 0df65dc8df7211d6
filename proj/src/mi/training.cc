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

#include "dpmi/mi/training.h"

#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "dpmi/common/parallel.h"
#include "dpmi/dp/dp_optimizer.h"
#include "dpmi/mi/features.h"

namespace dpmi::mi {
namespace {

enum Stream : std::uint64_t {
  kInitStream = 1,
  kOrderStream = 2,
  kPerturbStream = 3,
  kShadowStream = 0x5348414d,
};

std::vector<std::size_t> AllIndices(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

absl::StatusOr<TrainedModel> TrainUnderPrivacy(const data::Dataset& train,
                                               const data::Dataset& test,
                                               const ModelConfig& config,
                                               const dp::PrivacySpec& privacy,
                                               std::uint64_t seed) {
  if (absl::Status s = privacy.Validate(); !s.ok()) return s;
  if (train.empty()) return absl::InvalidArgumentError("train split is empty");

  std::vector<std::size_t> sizes = {train.width()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(static_cast<std::size_t>(train.num_classes));
  Rng init_rng(DeriveSeed(seed, kInitStream));
  auto net = nn::Network::Create(sizes, init_rng);
  if (!net.ok()) return net.status();

  nn::TrainConfig train_config = config.train;
  train_config.seed = DeriveSeed(seed, kOrderStream);

  TrainedModel model;
  model.seed = seed;
  model.net = *std::move(net);
  switch (privacy.mode) {
    case dp::PrivacyMode::kNone: {
      auto report = nn::Fit(model.net, train, test, train_config);
      if (!report.ok()) return report.status();
      model.report = *std::move(report);
      model.epsilon = std::numeric_limits<double>::infinity();
      model.train_input_hash = HashRecords(train, AllIndices(train.size()));
      break;
    }
    case dp::PrivacyMode::kLdp: {
      Rng perturb_rng(DeriveSeed(seed, kPerturbStream));
      auto perturbed = dp::PerturbDataset(train, privacy, perturb_rng);
      if (!perturbed.ok()) return perturbed.status();
      auto report = nn::Fit(model.net, perturbed->dataset, test, train_config);
      if (!report.ok()) return report.status();
      model.report = *std::move(report);
      model.epsilon = perturbed->epsilon;
      model.train_input_hash =
          HashRecords(perturbed->dataset, AllIndices(train.size()));
      break;
    }
    case dp::PrivacyMode::kCdp: {
      auto fit = dp::DpFit(model.net, train, test, privacy.cdp, train_config);
      if (!fit.ok()) return fit.status();
      model.report = std::move(fit->report);
      model.epsilon = fit->epsilon;
      model.delta = fit->delta;
      model.train_input_hash = HashRecords(train, AllIndices(train.size()));
      break;
    }
  }
  return model;
}

std::uint64_t ShadowSeed(std::uint64_t job_seed, std::size_t shadow) {
  return DeriveSeed(DeriveSeed(job_seed, kShadowStream), shadow);
}

absl::StatusOr<std::vector<TrainedModel>> TrainShadows(
    const data::Dataset& dataset, const data::AttackDataLayout& layout,
    const ModelConfig& config, const dp::PrivacySpec& privacy,
    std::uint64_t job_seed, std::size_t jobs) {
  std::vector<TrainedModel> shadows(layout.shadows.size());
  absl::Status status =
      ParallelFor(layout.shadows.size(), jobs, [&](std::size_t i) {
        const data::Dataset train = dataset.Subset(layout.shadows[i].train);
        const data::Dataset test = dataset.Subset(layout.shadows[i].test);
        auto model = TrainUnderPrivacy(train, test, config, privacy,
                                       ShadowSeed(job_seed, i));
        if (!model.ok()) {
          return absl::Status(
              model.status().code(),
              absl::StrCat("shadow ", i, ": ", model.status().message()));
        }
        shadows[i] = *std::move(model);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  return shadows;
}

}  // namespace dpmi::mi
