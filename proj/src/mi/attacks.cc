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

#include "dpmi/mi/attacks.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "dpmi/common/rng.h"

namespace dpmi::mi {
namespace {

absl::StatusOr<LabeledFeatures> InOut(AttackKind kind,
                                      const nn::Network& model,
                                      const data::Dataset& dataset,
                                      const data::IndexSet& members,
                                      const data::IndexSet& non_members) {
  auto in = ExtractFeatures(kind, model, dataset, members);
  if (!in.ok()) return in.status();
  auto out = ExtractFeatures(kind, model, dataset, non_members);
  if (!out.ok()) return out.status();
  return Merge(Label(*std::move(in), 1), Label(*std::move(out), 0));
}

absl::StatusOr<AttackResult> Evaluate(AttackKind kind, const AttackModel& model,
                                      LabeledFeatures training,
                                      LabeledFeatures evaluation) {
  auto scores = ScoreMembership(model, evaluation);
  if (!scores.ok()) return scores.status();
  auto roc = metrics::BuildRoc(scores->scores, scores->flags);
  if (!roc.ok()) return roc.status();
  AttackResult result;
  result.kind = kind;
  result.auc = metrics::Auc(*roc);
  result.roc = *std::move(roc);
  result.scores = *std::move(scores);
  result.training_features = std::move(training);
  result.evaluation_features = std::move(evaluation);
  result.fallback_classes = model.fallback_classes;
  return result;
}

}  // namespace

absl::StatusOr<AttackResult> RunBlackBoxAttack(
    const data::Dataset& dataset, const data::AttackDataLayout& layout,
    const TrainedModel& target, const std::vector<TrainedModel>& shadows,
    const AttackClassifierConfig& config) {
  if (shadows.empty() || shadows.size() != layout.shadows.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "black-box attack needs one trained shadow per layout pair (have ",
        shadows.size(), " models for ", layout.shadows.size(), " pairs)"));
  }
  LabeledFeatures training;
  for (std::size_t s = 0; s < shadows.size(); ++s) {
    auto f = InOut(AttackKind::kBlackBox, shadows[s].net, dataset,
                   layout.shadows[s].train, layout.shadows[s].test);
    if (!f.ok()) return f.status();
    auto merged = Merge(training, *f);
    if (!merged.ok()) return merged.status();
    training = *std::move(merged);
  }
  auto model = TrainAttackModel(training, AttackKind::kBlackBox,
                                dataset.num_classes, config);
  if (!model.ok()) return model.status();
  auto evaluation = InOut(AttackKind::kBlackBox, target.net, dataset,
                          layout.target_train, layout.target_test);
  if (!evaluation.ok()) return evaluation.status();
  return Evaluate(AttackKind::kBlackBox, *model, std::move(training),
                  *std::move(evaluation));
}

absl::StatusOr<WhiteBoxSplit> SplitKnown(const data::AttackDataLayout& layout,
                                         double known_fraction,
                                         std::uint64_t seed) {
  if (!(known_fraction > 0.0 && known_fraction < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "known fraction must lie in (0,1), got ", known_fraction));
  }
  if (layout.target_train.size() != layout.target_test.size()) {
    return absl::InvalidArgumentError(
        "target train and test must have equal sizes");
  }
  const std::size_t n = layout.target_train.size();
  const std::size_t known = static_cast<std::size_t>(
      std::llround(known_fraction * static_cast<double>(n)));
  if (known == 0 || known == n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "known fraction ", known_fraction, " of ", n,
        " records leaves an empty part"));
  }
  Rng rng(seed);
  data::IndexSet train = layout.target_train;
  data::IndexSet test = layout.target_test;
  rng.Shuffle(train);
  rng.Shuffle(test);
  WhiteBoxSplit split;
  split.known_train.assign(train.begin(), train.begin() + known);
  split.unknown_train.assign(train.begin() + known, train.end());
  split.known_test.assign(test.begin(), test.begin() + known);
  split.unknown_test.assign(test.begin() + known, test.end());
  return split;
}

absl::StatusOr<AttackResult> RunWhiteBoxAttack(
    const data::Dataset& dataset, const data::AttackDataLayout& layout,
    const TrainedModel& target, double known_fraction,
    const AttackClassifierConfig& config) {
  auto split = SplitKnown(layout, known_fraction, DeriveSeed(config.seed, 7));
  if (!split.ok()) return split.status();
  auto training = InOut(AttackKind::kWhiteBox, target.net, dataset,
                        split->known_train, split->known_test);
  if (!training.ok()) return training.status();
  auto model = TrainAttackModel(*training, AttackKind::kWhiteBox,
                                dataset.num_classes, config);
  if (!model.ok()) return model.status();
  auto evaluation = InOut(AttackKind::kWhiteBox, target.net, dataset,
                          split->unknown_train, split->unknown_test);
  if (!evaluation.ok()) return evaluation.status();
  return Evaluate(AttackKind::kWhiteBox, *model, *std::move(training),
                  *std::move(evaluation));
}

}  // namespace dpmi::mi
