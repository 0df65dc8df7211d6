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

// End-to-end attack pipelines.
//
// Black box: every shadow model is queried on its own train ("in") and test
// ("out") records; the per-class attack classifiers learn from these and are
// evaluated on the target's train and test records.
//
// White box: the attacker knows a fraction of the target's train and test
// records. The attack classifier learns from the target's features on the
// known part and is evaluated on the remaining, unknown part.
//
// Feature forward passes always run on the records as stored in `dataset`,
// i.e. never on locally perturbed copies.

#ifndef DPMI_MI_ATTACKS_H_
#define DPMI_MI_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"
#include "dpmi/data/splits.h"
#include "dpmi/metrics/roc.h"
#include "dpmi/mi/attack_model.h"
#include "dpmi/mi/features.h"
#include "dpmi/mi/training.h"

namespace dpmi::mi {

struct AttackResult {
  AttackKind kind = AttackKind::kBlackBox;
  double auc = 0.5;
  metrics::RocCurve roc;
  MembershipScores scores;
  // Attack training and evaluation features (flags attached).
  LabeledFeatures training_features;
  LabeledFeatures evaluation_features;
  std::vector<int> fallback_classes;
};

absl::StatusOr<AttackResult> RunBlackBoxAttack(
    const data::Dataset& dataset, const data::AttackDataLayout& layout,
    const TrainedModel& target, const std::vector<TrainedModel>& shadows,
    const AttackClassifierConfig& config);

struct WhiteBoxSplit {
  data::IndexSet known_train, known_test;
  data::IndexSet unknown_train, unknown_test;
};

// Splits the target sets into known and unknown parts; the same fraction
// is taken from train and test so both evaluation halves stay balanced.
absl::StatusOr<WhiteBoxSplit> SplitKnown(const data::AttackDataLayout& layout,
                                         double known_fraction,
                                         std::uint64_t seed);

absl::StatusOr<AttackResult> RunWhiteBoxAttack(
    const data::Dataset& dataset, const data::AttackDataLayout& layout,
    const TrainedModel& target, double known_fraction,
    const AttackClassifierConfig& config);

}  // namespace dpmi::mi

#endif  // DPMI_MI_ATTACKS_H_
