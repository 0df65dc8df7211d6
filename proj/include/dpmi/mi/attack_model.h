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

#ifndef DPMI_MI_ATTACK_MODEL_H_
#define DPMI_MI_ATTACK_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"
#include "dpmi/mi/features.h"
#include "dpmi/nn/network.h"

namespace dpmi::mi {

struct AttackClassifierConfig {
  std::size_t hidden = 64;
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  // Fraction of the training rows held out for early stopping.
  double holdout = 0.2;
  // Columns that are non-negative on the training rows are mapped through
  // ln(max(x, 1e-12)) before standardization, which spreads out the
  // near-zero losses and near-one confidences where members concentrate.
  bool log_scale = true;
  std::uint64_t seed = 0;

  absl::Status Validate() const;
};

// Binary member/non-member classifier over standardized features. Training
// rows are put into a canonical order first, so the result does not depend
// on the order they were supplied in.
class BinaryClassifier {
 public:
  static absl::StatusOr<BinaryClassifier> Train(
      const Matrix& features, std::span<const std::uint8_t> flags,
      const AttackClassifierConfig& config);
  // Scores every row with `score`.
  static BinaryClassifier Constant(double score);

  bool is_constant() const { return constant_; }
  // Probability of membership per row.
  absl::StatusOr<std::vector<double>> Score(const Matrix& features) const;

 private:
  bool constant_ = true;
  double constant_score_ = 0.5;
  // Maps a raw row to the network input.
  void Transform(std::span<const double> row, std::span<double> out) const;

  std::vector<std::uint8_t> log_column_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  nn::Network net_;
};

// Black-box: one classifier per class. White-box: a single classifier.
struct AttackModel {
  AttackKind kind = AttackKind::kBlackBox;
  std::vector<BinaryClassifier> classifiers;
  // Classes whose classifier fell back to the constant 0.5 score because
  // their training features lacked members or non-members.
  std::vector<int> fallback_classes;
};

absl::StatusOr<AttackModel> TrainAttackModel(const LabeledFeatures& training,
                                             AttackKind kind, int num_classes,
                                             const AttackClassifierConfig& config);

struct MembershipScores {
  std::vector<double> scores;
  std::vector<std::uint8_t> flags;
};

// Scores a balanced evaluation set (equal member and non-member counts).
absl::StatusOr<MembershipScores> ScoreMembership(
    const AttackModel& attack, const LabeledFeatures& evaluation);

}  // namespace dpmi::mi

#endif  // DPMI_MI_ATTACK_MODEL_H_
