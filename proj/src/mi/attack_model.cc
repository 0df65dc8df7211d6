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

#include "dpmi/mi/attack_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "dpmi/common/rng.h"
#include "dpmi/nn/backprop.h"
#include "dpmi/nn/trainer.h"

namespace dpmi::mi {
namespace {

constexpr double kLogFloor = 1e-12;

data::Dataset BinaryDataset(const Matrix& x, std::span<const std::uint8_t> y,
                            std::span<const std::size_t> rows) {
  data::Dataset d;
  d.kind = data::FeatureKind::kReal;
  d.num_classes = 2;
  d.features = Matrix(rows.size(), x.cols());
  d.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), d.features.row(i).begin());
    d.labels.push_back(y[rows[i]]);
  }
  return d;
}

}  // namespace

absl::Status AttackClassifierConfig::Validate() const {
  if (hidden == 0 || batch_size == 0 || max_epochs == 0) {
    return absl::InvalidArgumentError(
        "attack classifier needs positive hidden, batch_size and max_epochs");
  }
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("attack learning rate must be positive");
  }
  if (!(holdout >= 0.0 && holdout < 1.0)) {
    return absl::InvalidArgumentError("holdout fraction must lie in [0,1)");
  }
  return absl::OkStatus();
}

BinaryClassifier BinaryClassifier::Constant(double score) {
  BinaryClassifier c;
  c.constant_ = true;
  c.constant_score_ = score;
  return c;
}

absl::StatusOr<BinaryClassifier> BinaryClassifier::Train(
    const Matrix& features, std::span<const std::uint8_t> flags,
    const AttackClassifierConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (features.rows() != flags.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        features.rows(), " feature rows but ", flags.size(), " flags"));
  }
  const std::size_t members =
      static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  if (members == 0 || members == flags.size()) {
    return absl::InvalidArgumentError(
        "attack training needs both members and non-members");
  }
  const std::size_t n = features.rows();
  const std::size_t width = features.cols();

  // Canonical row order: statistics and the seeded shuffle below then see
  // the same sequence whatever order the rows arrived in.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = features.row(a);
    const auto rb = features.row(b);
    if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(),
                                     rb.end())) {
      return true;
    }
    if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(),
                                     ra.end())) {
      return false;
    }
    return flags[a] < flags[b];
  });

  BinaryClassifier out;
  out.constant_ = false;
  out.log_column_.assign(width, 0);
  out.mean_.assign(width, 0.0);
  out.scale_.assign(width, 1.0);
  if (config.log_scale) {
    for (std::size_t j = 0; j < width; ++j) {
      bool non_negative = true;
      for (std::size_t i = 0; i < n && non_negative; ++i) {
        non_negative = features(i, j) >= 0.0;
      }
      out.log_column_[j] = non_negative;
    }
  }
  Matrix x(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const double v = features(i, j);
      x(i, j) = out.log_column_[j] ? std::log(std::max(v, kLogFloor)) : v;
    }
  }
  for (std::size_t j = 0; j < width; ++j) {
    double sum = 0.0;
    for (std::size_t i : order) sum += x(i, j);
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t i : order) {
      const double d = x(i, j) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    out.mean_[j] = mean;
    out.scale_[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      x(i, j) = (x(i, j) - out.mean_[j]) * out.scale_[j];
    }
  }

  Rng rng(config.seed);
  rng.Shuffle(order);

  const std::size_t held = static_cast<std::size_t>(
      std::floor(config.holdout * static_cast<double>(n)));
  const std::size_t fit_rows = n - held;
  const std::span<const std::size_t> fit_idx(order.data(), fit_rows);
  const std::span<const std::size_t> hold_idx(order.data() + fit_rows, held);
  const data::Dataset fit_set = BinaryDataset(x, flags, fit_idx);
  const data::Dataset hold_set =
      held > 0 ? BinaryDataset(x, flags, hold_idx) : fit_set;

  const std::vector<std::size_t> sizes = {width, config.hidden, 2};
  Rng init_rng(DeriveSeed(config.seed, 1));
  auto net = nn::Network::Create(sizes, init_rng);
  if (!net.ok()) return net.status();
  out.net_ = *std::move(net);

  nn::TrainConfig tc;
  tc.optimizer.kind = nn::OptimizerKind::kAdam;
  tc.optimizer.learning_rate = config.learning_rate;
  tc.batch_size = config.batch_size;
  tc.max_epochs = config.max_epochs;
  tc.early_stopping = held > 0;
  tc.patience = config.patience;
  tc.seed = DeriveSeed(config.seed, 2);
  auto report = nn::Fit(out.net_, fit_set, hold_set, tc);
  if (!report.ok()) return report.status();
  return out;
}

void BinaryClassifier::Transform(std::span<const double> row,
                                 std::span<double> out) const {
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double v =
        log_column_[j] ? std::log(std::max(row[j], kLogFloor)) : row[j];
    out[j] = (v - mean_[j]) * scale_[j];
  }
}

absl::StatusOr<std::vector<double>> BinaryClassifier::Score(
    const Matrix& features) const {
  std::vector<double> scores(features.rows(), constant_score_);
  if (constant_) return scores;
  if (features.cols() != mean_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "attack features have width ", features.cols(), ", expected ",
        mean_.size()));
  }
  nn::ExampleWorkspace ws(net_);
  std::vector<double> x(mean_.size());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    Transform(features.row(i), x);
    ws.Forward(net_, x);
    scores[i] = ws.softmax()[1];
  }
  return scores;
}

absl::StatusOr<AttackModel> TrainAttackModel(
    const LabeledFeatures& training, AttackKind kind, int num_classes,
    const AttackClassifierConfig& config) {
  if (training.flags.size() != training.block.size()) {
    return absl::InvalidArgumentError("every feature row needs a flag");
  }
  if (num_classes < 1) return absl::InvalidArgumentError("no classes");
  AttackModel model;
  model.kind = kind;
  if (kind == AttackKind::kWhiteBox) {
    auto c = BinaryClassifier::Train(training.block.features, training.flags,
                                     config);
    if (!c.ok()) return c.status();
    model.classifiers.push_back(*std::move(c));
    return model;
  }
  for (int cls = 0; cls < num_classes; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < training.block.size(); ++i) {
      if (training.block.classes[i] == cls) rows.push_back(i);
    }
    Matrix x(rows.size(), training.block.features.cols());
    std::vector<std::uint8_t> y(rows.size());
    std::size_t members = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto src = training.block.features.row(rows[i]);
      std::copy(src.begin(), src.end(), x.row(i).begin());
      y[i] = training.flags[rows[i]];
      members += y[i];
    }
    if (members == 0 || members == rows.size()) {
      model.classifiers.push_back(BinaryClassifier::Constant(0.5));
      model.fallback_classes.push_back(cls);
      continue;
    }
    AttackClassifierConfig per_class = config;
    per_class.seed = DeriveSeed(config.seed, 100 + cls);
    auto c = BinaryClassifier::Train(x, y, per_class);
    if (!c.ok()) return c.status();
    model.classifiers.push_back(*std::move(c));
  }
  return model;
}

absl::StatusOr<MembershipScores> ScoreMembership(
    const AttackModel& attack, const LabeledFeatures& evaluation) {
  const std::size_t n = evaluation.block.size();
  if (evaluation.flags.size() != n) {
    return absl::InvalidArgumentError("every evaluation row needs a flag");
  }
  const std::size_t members = static_cast<std::size_t>(
      std::count(evaluation.flags.begin(), evaluation.flags.end(), 1));
  if (n == 0 || 2 * members != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "evaluation set must be balanced: ", members, " members and ",
        n - members, " non-members"));
  }
  MembershipScores out;
  out.flags = evaluation.flags;
  out.scores.assign(n, 0.5);
  if (attack.kind == AttackKind::kWhiteBox) {
    if (attack.classifiers.size() != 1) {
      return absl::FailedPreconditionError("white-box attack is not trained");
    }
    auto s = attack.classifiers[0].Score(evaluation.block.features);
    if (!s.ok()) return s.status();
    out.scores = *std::move(s);
    return out;
  }
  const std::size_t width = evaluation.block.features.cols();
  Matrix one(1, width);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = evaluation.block.classes[i];
    if (cls < 0 || static_cast<std::size_t>(cls) >= attack.classifiers.size()) {
      return absl::OutOfRangeError(
          absl::StrCat("record ", i, " has class ", cls,
                       " without an attack classifier"));
    }
    const auto src = evaluation.block.features.row(i);
    std::copy(src.begin(), src.end(), one.row(0).begin());
    auto s = attack.classifiers[cls].Score(one);
    if (!s.ok()) return s.status();
    out.scores[i] = (*s)[0];
  }
  return out;
}

}  // namespace dpmi::mi
