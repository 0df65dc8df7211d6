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

#ifndef DPMI_METRICS_ROC_H_
#define DPMI_METRICS_ROC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpmi::metrics {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

// Points ordered by decreasing threshold, from (0,0) to (1,1). Curves built
// from scores also keep the integer true/false positive counts behind every
// point, so their area is computed without rounding in the sums.
struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<std::uint64_t> true_positives;
  std::vector<std::uint64_t> false_positives;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;

  bool has_counts() const { return !true_positives.empty(); }
};

// One point per distinct score (all records sharing a score move together),
// plus the (0,0) origin. flags: 1 = member (positive), 0 = non-member.
absl::StatusOr<RocCurve> BuildRoc(std::span<const double> scores,
                                  std::span<const std::uint8_t> flags);

// Trapezoidal area. For count-backed curves this equals the Mann-Whitney
// statistic P[s_member > s_non] + P[tie]/2 to the last bit.
double Auc(const RocCurve& curve);

// Convenience: Auc(BuildRoc(scores, flags)).
absl::StatusOr<double> AucFromScores(std::span<const double> scores,
                                     std::span<const std::uint8_t> flags);

// `points` uniformly spaced values covering [0,1].
std::vector<double> UniformGrid(std::size_t points = 101);

// Linear interpolation of TPR at `fpr`. At a vertical segment (several points
// sharing that FPR) the largest TPR is returned.
double InterpolateTpr(const RocCurve& curve, double fpr);

// Pointwise mean of the curves' interpolated TPR over `grid`. The first grid
// point is pinned to TPR 0 at FPR 0 and the last to TPR 1 at FPR 1.
absl::StatusOr<RocCurve> MeanRoc(std::span<const RocCurve> curves,
                                 std::span<const double> grid);

// Resamples one curve onto the grid with the same pinning as MeanRoc.
RocCurve Resample(const RocCurve& curve, std::span<const double> grid);

}  // namespace dpmi::metrics

#endif  // DPMI_METRICS_ROC_H_
