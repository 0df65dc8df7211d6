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

// Synthetic datasets used by the experiments and the acceptance suite.

#ifndef DPMI_DATA_GENERATORS_H_
#define DPMI_DATA_GENERATORS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"

namespace dpmi::data {

// Skewed binary baskets. Class c owns the contiguous indicator block
// [c*d/C, (c+1)*d/C); its bits are set with p_indicator in both splits. The
// remaining d - d/C noise bits are set with p_noise_train in the train split
// and p_noise_test in the test split. Labels are uniform over classes.
struct SkewSpec {
  int num_classes = 10;
  // Records per split.
  std::size_t records = 10000;
  std::size_t width = 600;
  double p_indicator = 0.8;
  double p_noise_train = 0.2;
  double p_noise_test = 0.5;
  std::uint64_t seed = 0;

  absl::Status Validate() const;
};

struct SkewedSplits {
  Dataset train;
  Dataset test;
};

absl::StatusOr<SkewedSplits> GenSkewedPurchases(const SkewSpec& spec);

// Both splits in one dataset, train records first, tagged with domain 0
// (train) and 1 (test).
absl::StatusOr<Dataset> GenSkewedPurchasesPooled(const SkewSpec& spec);

// Shannon entropy of a Bernoulli(p) variable, in bits.
double BinaryEntropy(double p);

// Class-conditional per-bit entropy gap (test minus train, in bits) between
// two binary datasets that share the indicator-block layout. Per class, the
// empirical frequency of every bit is turned into an entropy; the gap is
// averaged over (class, position) pairs.
struct EntropyGap {
  // Positions outside the class's own indicator block.
  double noise_positions = 0.0;
  // All d positions; indicator positions contribute ~0.
  double all_positions = 0.0;
};
absl::StatusOr<EntropyGap> MeasureEntropyGap(const Dataset& train,
                                             const Dataset& test);

// Expected values of MeasureEntropyGap for a spec.
EntropyGap AnalyticEntropyGap(const SkewSpec& spec);

// Unbalanced binary carts: class sizes proportional to rank^(-imbalance)
// (largest-remainder rounding). Every class plants a random pattern of
// `pattern_bits` positions set with `pattern_strength`; other bits are set
// with `background`.
struct CartSpec {
  int num_classes = 10;
  std::size_t records = 2000;
  std::size_t width = 100;
  double imbalance = 1.0;
  double pattern_strength = 0.7;
  double background = 0.15;
  // 0 picks width / num_classes.
  std::size_t pattern_bits = 0;
  std::uint64_t seed = 0;

  absl::Status Validate() const;
};

absl::StatusOr<Dataset> GenUnbalancedCarts(const CartSpec& spec);

// Splits `total` into parts proportional to `weights` with largest-remainder
// rounding (ties to the lower index).
std::vector<std::size_t> LargestRemainder(std::span<const double> weights,
                                          std::size_t total);

enum class ImagePattern {
  kHorizontalBars,
  kVerticalBars,
  kDiagonal,
  kCross,
  kCheckerboard,
  kRing,
  kCorners,
  kCenterBlock,
};

std::string_view ImagePatternName(ImagePattern pattern);
absl::StatusOr<ImagePattern> ParseImagePattern(std::string_view name);
std::vector<ImagePattern> AllImagePatterns();

// Grayscale images with one class per pattern: a bright pattern on a dark
// background, shifted by up to side/8 pixels, plus Gaussian pixel noise,
// rounded and clamped to [0,255].
struct ImageSpec {
  std::size_t count = 1000;
  std::size_t side = 16;
  std::vector<ImagePattern> patterns = AllImagePatterns();
  double noise_stddev = 20.0;
  std::uint64_t seed = 0;

  absl::Status Validate() const;
};

absl::StatusOr<Dataset> GenGrayImages(const ImageSpec& spec);

}  // namespace dpmi::data

#endif  // DPMI_DATA_GENERATORS_H_
