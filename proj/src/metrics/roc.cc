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

#include "dpmi/metrics/roc.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace dpmi::metrics {

absl::StatusOr<RocCurve> BuildRoc(std::span<const double> scores,
                                  std::span<const std::uint8_t> flags) {
  if (scores.size() != flags.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        scores.size(), " scores but ", flags.size(), " membership flags"));
  }
  RocCurve curve;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("score ", i, " is not finite"));
    }
    if (flags[i] > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("flag ", i, " is not 0 or 1"));
    }
    if (flags[i]) {
      ++curve.positives;
    } else {
      ++curve.negatives;
    }
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    return absl::InvalidArgumentError(
        "ROC needs at least one member and one non-member");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  std::uint64_t tp = 0, fp = 0;
  curve.true_positives.push_back(0);
  curve.false_positives.push_back(0);
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == threshold; ++k) {
      if (flags[order[k]]) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.true_positives.push_back(tp);
    curve.false_positives.push_back(fp);
  }
  const double p = static_cast<double>(curve.positives);
  const double n = static_cast<double>(curve.negatives);
  for (std::size_t k = 0; k < curve.true_positives.size(); ++k) {
    curve.points.push_back({curve.false_positives[k] / n,
                            curve.true_positives[k] / p});
  }
  return curve;
}

double Auc(const RocCurve& curve) {
  if (curve.has_counts()) {
    // sum (fp_k - fp_{k-1}) (tp_k + tp_{k-1}) over 2PN, in integers.
    std::uint64_t twice_area = 0;
    for (std::size_t k = 1; k < curve.true_positives.size(); ++k) {
      twice_area += (curve.false_positives[k] - curve.false_positives[k - 1]) *
                    (curve.true_positives[k] + curve.true_positives[k - 1]);
    }
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(curve.positives) *
            static_cast<double>(curve.negatives));
  }
  double area = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const RocPoint& a = curve.points[k - 1];
    const RocPoint& b = curve.points[k];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

absl::StatusOr<double> AucFromScores(std::span<const double> scores,
                                     std::span<const std::uint8_t> flags) {
  auto curve = BuildRoc(scores, flags);
  if (!curve.ok()) return curve.status();
  return Auc(*curve);
}

std::vector<double> UniformGrid(std::size_t points) {
  std::vector<double> grid;
  if (points == 0) return grid;
  if (points == 1) return {0.0};
  for (std::size_t k = 0; k < points; ++k) {
    grid.push_back(static_cast<double>(k) / static_cast<double>(points - 1));
  }
  return grid;
}

double InterpolateTpr(const RocCurve& curve, double fpr) {
  const auto& pts = curve.points;
  if (pts.empty()) return 0.0;
  // Last point with FPR <= fpr: on a vertical segment this is the top.
  auto upper = std::upper_bound(
      pts.begin(), pts.end(), fpr,
      [](double f, const RocPoint& p) { return f < p.fpr; });
  if (upper == pts.begin()) return pts.front().tpr;
  const RocPoint& lo = *(upper - 1);
  if (lo.fpr == fpr || upper == pts.end()) return lo.tpr;
  const RocPoint& hi = *upper;
  const double t = (fpr - lo.fpr) / (hi.fpr - lo.fpr);
  return lo.tpr + t * (hi.tpr - lo.tpr);
}

RocCurve Resample(const RocCurve& curve, std::span<const double> grid) {
  RocCurve out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double tpr = InterpolateTpr(curve, grid[k]);
    if (k == 0 && grid[k] == 0.0) tpr = 0.0;
    if (k + 1 == grid.size() && grid[k] == 1.0) tpr = 1.0;
    out.points.push_back({grid[k], tpr});
  }
  return out;
}

absl::StatusOr<RocCurve> MeanRoc(std::span<const RocCurve> curves,
                                 std::span<const double> grid) {
  if (curves.empty()) return absl::InvalidArgumentError("no curves to average");
  if (grid.empty()) return absl::InvalidArgumentError("FPR grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= 1.0) ||
        (k > 0 && grid[k] < grid[k - 1])) {
      return absl::InvalidArgumentError(
          "FPR grid must be non-decreasing within [0,1]");
    }
  }
  RocCurve mean;
  mean.points.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) mean.points[k].fpr = grid[k];
  for (const RocCurve& c : curves) {
    const RocCurve r = Resample(c, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      mean.points[k].tpr += r.points[k].tpr;
    }
  }
  const double count = static_cast<double>(curves.size());
  for (RocPoint& p : mean.points) p.tpr /= count;
  return mean;
}

}  // namespace dpmi::metrics
