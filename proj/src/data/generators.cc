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

#include "dpmi/data/generators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "absl/strings/str_cat.h"
#include "dpmi/common/rng.h"

namespace dpmi::data {
namespace {

absl::Status CheckProbability(double p, std::string_view name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(name), " must lie in [0,1], got ", p));
  }
  return absl::OkStatus();
}

Dataset SkewedSplit(const SkewSpec& spec, double p_noise, Rng rng) {
  const std::size_t block = spec.width / spec.num_classes;
  Dataset d;
  d.kind = FeatureKind::kBinary;
  d.num_classes = spec.num_classes;
  d.features = Matrix(spec.records, spec.width);
  d.labels.resize(spec.records);
  for (std::size_t i = 0; i < spec.records; ++i) {
    const int label = static_cast<int>(rng.UniformIndex(spec.num_classes));
    d.labels[i] = label;
    const std::size_t lo = label * block;
    const std::size_t hi = lo + block;
    auto row = d.features.row(i);
    for (std::size_t j = 0; j < spec.width; ++j) {
      const double p = (j >= lo && j < hi) ? spec.p_indicator : p_noise;
      row[j] = rng.Uniform() < p ? 1.0 : 0.0;
    }
  }
  return d;
}

// Per-class bit frequencies: counts[c][j] / class_size[c].
std::vector<std::vector<double>> ClassBitFrequencies(const Dataset& d) {
  std::vector<std::vector<double>> freq(
      d.num_classes, std::vector<double>(d.width(), 0.0));
  const std::vector<std::size_t> counts = d.ClassCounts();
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& f = freq[d.labels[i]];
    const auto row = d.features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) f[j] += row[j];
  }
  for (int c = 0; c < d.num_classes; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : freq[c]) v /= static_cast<double>(counts[c]);
  }
  return freq;
}

bool PatternPixel(ImagePattern pattern, long r, long c, long side) {
  const long band = std::max(1L, side / 8);
  const long mid = side / 2;
  switch (pattern) {
    case ImagePattern::kHorizontalBars:
      return ((r % (4 * band)) + 4 * band) % (4 * band) < band * 2 &&
             r >= 0 && r < side;
    case ImagePattern::kVerticalBars:
      return ((c % (4 * band)) + 4 * band) % (4 * band) < band * 2 &&
             c >= 0 && c < side;
    case ImagePattern::kDiagonal:
      return std::labs(r - c) <= band;
    case ImagePattern::kCross:
      return std::labs(r - mid) <= band / 2 + 1 ||
             std::labs(c - mid) <= band / 2 + 1;
    case ImagePattern::kCheckerboard:
      return ((((r / (2 * band)) + (c / (2 * band))) % 2) + 2) % 2 == 0;
    case ImagePattern::kRing: {
      const double dr = static_cast<double>(r - mid);
      const double dc = static_cast<double>(c - mid);
      const double dist = std::sqrt(dr * dr + dc * dc);
      return std::fabs(dist - side * 0.3) <= band;
    }
    case ImagePattern::kCorners: {
      const long q = side / 4;
      return (r < q || r >= side - q) && (c < q || c >= side - q);
    }
    case ImagePattern::kCenterBlock:
      return std::labs(r - mid) < side / 4 && std::labs(c - mid) < side / 4;
  }
  return false;
}

}  // namespace

absl::Status SkewSpec::Validate() const {
  if (num_classes < 2) {
    return absl::InvalidArgumentError("need at least 2 classes");
  }
  if (width == 0 || width % num_classes != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature width ", width, " is not divisible by ", num_classes,
        " classes"));
  }
  if (absl::Status s = CheckProbability(p_indicator, "p_indicator"); !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckProbability(p_noise_train, "p_noise_train");
      !s.ok()) {
    return s;
  }
  return CheckProbability(p_noise_test, "p_noise_test");
}

absl::StatusOr<SkewedSplits> GenSkewedPurchases(const SkewSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  const Rng root(spec.seed);
  SkewedSplits out;
  out.train = SkewedSplit(spec, spec.p_noise_train, root.Fork(0));
  out.test = SkewedSplit(spec, spec.p_noise_test, root.Fork(1));
  return out;
}

absl::StatusOr<Dataset> GenSkewedPurchasesPooled(const SkewSpec& spec) {
  auto splits = GenSkewedPurchases(spec);
  if (!splits.ok()) return splits.status();
  splits->train.domain.assign(splits->train.size(), 0);
  splits->test.domain.assign(splits->test.size(), 1);
  return Concatenate(splits->train, splits->test);
}

double BinaryEntropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

absl::StatusOr<EntropyGap> MeasureEntropyGap(const Dataset& train,
                                             const Dataset& test) {
  if (train.kind != FeatureKind::kBinary || test.kind != FeatureKind::kBinary) {
    return absl::InvalidArgumentError("entropy gap needs binary datasets");
  }
  if (train.width() != test.width() || train.num_classes != test.num_classes) {
    return absl::InvalidArgumentError("datasets differ in width or classes");
  }
  const int classes = train.num_classes;
  if (classes < 1 || train.width() % classes != 0) {
    return absl::InvalidArgumentError(
        "width is not divisible by the class count");
  }
  if (train.empty() || test.empty()) {
    return absl::InvalidArgumentError("entropy gap needs non-empty datasets");
  }
  const auto f_train = ClassBitFrequencies(train);
  const auto f_test = ClassBitFrequencies(test);
  const auto n_train = train.ClassCounts();
  const auto n_test = test.ClassCounts();
  const std::size_t block = train.width() / classes;

  double all_sum = 0.0, noise_sum = 0.0;
  std::size_t all_count = 0, noise_count = 0;
  for (int c = 0; c < classes; ++c) {
    if (n_train[c] == 0 || n_test[c] == 0) continue;
    for (std::size_t j = 0; j < train.width(); ++j) {
      const double diff =
          BinaryEntropy(f_test[c][j]) - BinaryEntropy(f_train[c][j]);
      all_sum += diff;
      ++all_count;
      if (j / block != static_cast<std::size_t>(c)) {
        noise_sum += diff;
        ++noise_count;
      }
    }
  }
  if (all_count == 0) {
    return absl::InvalidArgumentError("no class is present in both datasets");
  }
  EntropyGap gap;
  gap.all_positions = all_sum / all_count;
  gap.noise_positions = noise_count == 0 ? 0.0 : noise_sum / noise_count;
  return gap;
}

EntropyGap AnalyticEntropyGap(const SkewSpec& spec) {
  const double noise =
      BinaryEntropy(spec.p_noise_test) - BinaryEntropy(spec.p_noise_train);
  const double c = static_cast<double>(spec.num_classes);
  return {noise, (1.0 - 1.0 / c) * noise};
}

std::vector<std::size_t> LargestRemainder(std::span<const double> weights,
                                          std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> parts(weights.size(), 0);
  if (weights.empty() || !(sum > 0.0)) return parts;
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double exact = total * weights[k] / sum;
    parts[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - parts[k];
    assigned += parts[k];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++parts[order[k % order.size()]];
  }
  return parts;
}

absl::Status CartSpec::Validate() const {
  if (num_classes < 2) {
    return absl::InvalidArgumentError("need at least 2 classes");
  }
  if (width < static_cast<std::size_t>(num_classes)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature width ", width, " is smaller than the class count ",
        num_classes));
  }
  if (records < static_cast<std::size_t>(num_classes)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "record count ", records, " is smaller than the class count ",
        num_classes));
  }
  if (!(imbalance >= 0.0) || !std::isfinite(imbalance)) {
    return absl::InvalidArgumentError("imbalance exponent must be >= 0");
  }
  if (pattern_bits > width) {
    return absl::InvalidArgumentError("pattern_bits exceeds the width");
  }
  if (absl::Status s = CheckProbability(pattern_strength, "pattern_strength");
      !s.ok()) {
    return s;
  }
  return CheckProbability(background, "background");
}

absl::StatusOr<Dataset> GenUnbalancedCarts(const CartSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  Rng rng(spec.seed);

  std::vector<double> weights(spec.num_classes);
  for (int k = 0; k < spec.num_classes; ++k) {
    weights[k] = std::pow(static_cast<double>(k + 1), -spec.imbalance);
  }
  const std::vector<std::size_t> sizes = LargestRemainder(weights, spec.records);

  const std::size_t pattern_bits =
      spec.pattern_bits == 0 ? spec.width / spec.num_classes : spec.pattern_bits;
  std::vector<std::vector<std::uint8_t>> patterns(spec.num_classes);
  std::vector<std::size_t> positions(spec.width);
  for (auto& pattern : patterns) {
    std::iota(positions.begin(), positions.end(), 0);
    rng.Shuffle(positions);
    pattern.assign(spec.width, 0);
    for (std::size_t b = 0; b < pattern_bits; ++b) pattern[positions[b]] = 1;
  }

  std::vector<int> labels;
  labels.reserve(spec.records);
  for (int k = 0; k < spec.num_classes; ++k) labels.insert(labels.end(), sizes[k], k);
  rng.Shuffle(labels);

  Dataset d;
  d.kind = FeatureKind::kBinary;
  d.num_classes = spec.num_classes;
  d.features = Matrix(spec.records, spec.width);
  d.labels = labels;
  for (std::size_t i = 0; i < spec.records; ++i) {
    const auto& pattern = patterns[labels[i]];
    auto row = d.features.row(i);
    for (std::size_t j = 0; j < spec.width; ++j) {
      const double p = pattern[j] ? spec.pattern_strength : spec.background;
      row[j] = rng.Uniform() < p ? 1.0 : 0.0;
    }
  }
  return d;
}

std::string_view ImagePatternName(ImagePattern pattern) {
  switch (pattern) {
    case ImagePattern::kHorizontalBars:
      return "hbars";
    case ImagePattern::kVerticalBars:
      return "vbars";
    case ImagePattern::kDiagonal:
      return "diagonal";
    case ImagePattern::kCross:
      return "cross";
    case ImagePattern::kCheckerboard:
      return "checker";
    case ImagePattern::kRing:
      return "ring";
    case ImagePattern::kCorners:
      return "corners";
    case ImagePattern::kCenterBlock:
      return "center";
  }
  return "unknown";
}

absl::StatusOr<ImagePattern> ParseImagePattern(std::string_view name) {
  for (ImagePattern p : AllImagePatterns()) {
    if (ImagePatternName(p) == name) return p;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown image pattern '", std::string(name), "'"));
}

std::vector<ImagePattern> AllImagePatterns() {
  return {ImagePattern::kHorizontalBars, ImagePattern::kVerticalBars,
          ImagePattern::kDiagonal,       ImagePattern::kCross,
          ImagePattern::kCheckerboard,   ImagePattern::kRing,
          ImagePattern::kCorners,        ImagePattern::kCenterBlock};
}

absl::Status ImageSpec::Validate() const {
  if (side < 8) {
    return absl::InvalidArgumentError(
        absl::StrCat("image side must be at least 8, got ", side));
  }
  if (patterns.size() < 2) {
    return absl::InvalidArgumentError("need at least 2 patterns");
  }
  if (!(noise_stddev >= 0.0)) {
    return absl::InvalidArgumentError("noise stddev must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> GenGrayImages(const ImageSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  Rng rng(spec.seed);
  const long side = static_cast<long>(spec.side);
  const long max_shift = side / 8;
  Dataset d;
  d.kind = FeatureKind::kImage;
  d.num_classes = static_cast<int>(spec.patterns.size());
  d.image_side = spec.side;
  d.features = Matrix(spec.count, spec.side * spec.side);
  d.labels.resize(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const int label = static_cast<int>(rng.UniformIndex(spec.patterns.size()));
    d.labels[i] = label;
    const long dr = static_cast<long>(rng.UniformIndex(2 * max_shift + 1)) -
                    max_shift;
    const long dc = static_cast<long>(rng.UniformIndex(2 * max_shift + 1)) -
                    max_shift;
    auto row = d.features.row(i);
    for (long r = 0; r < side; ++r) {
      for (long c = 0; c < side; ++c) {
        const bool on = PatternPixel(spec.patterns[label], r - dr, c - dc, side);
        const double base = on ? 200.0 : 40.0;
        const double v = base + rng.Normal(0.0, spec.noise_stddev);
        row[r * side + c] = std::clamp(std::round(v), 0.0, 255.0);
      }
    }
  }
  return d;
}

}  // namespace dpmi::data
