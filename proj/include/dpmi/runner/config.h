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

// Experiment configuration: one JSON file per experiment.
//
// {
//   "experiment_id": "carts-ldp",
//   "dataset": {"generator": "carts", "records": 4000, ...}
//              or {"csv": "data.csv", "label_column": "label", "kind": "binary"},
//   "target_size": 500,
//   "model": {"hidden": [64], "optimizer": "adam", "learning_rate": 0.001,
//             "batch_size": 128, "epochs": 200, "early_stopping": true},
//   "privacy": {"mode": "ldp", "epsilon_i": 1.0},
//   "attack": {"kind": "both", "shadows": 10, "known_fraction": 0.5, ...},
//   "repeats": 5, "seed": 0,
//   "sweep": {"epsilon_i": [0.1, 1, 3]}
// }
//
// Unknown keys are rejected. README.md lists every field and its default.

#ifndef DPMI_RUNNER_CONFIG_H_
#define DPMI_RUNNER_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"
#include "dpmi/data/generators.h"
#include "dpmi/dp/privacy_spec.h"
#include "dpmi/mi/attack_model.h"
#include "dpmi/mi/training.h"

namespace dpmi::runner {

enum class DatasetSource { kCarts, kSkewed, kImages, kCsv };

std::string_view DatasetSourceName(DatasetSource source);

struct DatasetConfig {
  DatasetSource source = DatasetSource::kCarts;
  // Defaults to the generator name or the CSV file stem.
  std::string name;
  data::CartSpec carts;
  data::SkewSpec skewed;
  data::ImageSpec images;
  std::string csv_path;
  std::string label_column = "label";
  data::FeatureKind csv_kind = data::FeatureKind::kBinary;
  // Generator seed; the experiment seed when unset.
  std::optional<std::uint64_t> seed;

  std::string DisplayName() const;
};

enum class AttackSelection { kBlackBox, kWhiteBox, kBoth };

std::string_view AttackSelectionName(AttackSelection selection);

enum class SweepAxis { kNone, kEpsilonI, kNoiseMultiplier };

std::string_view SweepAxisName(SweepAxis axis);

struct ExperimentConfig {
  std::string experiment_id;
  DatasetConfig dataset;
  std::size_t target_size = 500;
  std::size_t shadows = 10;
  double known_fraction = 0.5;
  bool stratified = false;
  mi::ModelConfig model;
  dp::PrivacySpec privacy;
  AttackSelection attack = AttackSelection::kBoth;
  mi::AttackClassifierConfig attack_model;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<double> sweep_values;

  // Checks ranges, mode/axis consistency and that a CSV source exists.
  absl::Status Validate() const;
};

ExperimentConfig DefaultConfig();

// Parses and validates.
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view json_text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// Pretty-printed JSON with every field spelled out; ParseConfig accepts it.
std::string DumpConfig(const ExperimentConfig& config);

}  // namespace dpmi::runner

#endif  // DPMI_RUNNER_CONFIG_H_
