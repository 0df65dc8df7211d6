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

#include "dpmi/metrics/tradeoff.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dpmi::metrics {

absl::StatusOr<std::optional<double>> Phi(double auc_orig, double auc_eps,
                                          double acc_orig, double acc_eps,
                                          int num_classes) {
  for (double v : {auc_orig, auc_eps, acc_orig, acc_eps}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("phi inputs must lie in [0,1], got ", v));
    }
  }
  if (num_classes < 2) {
    return absl::InvalidArgumentError("phi needs at least 2 classes");
  }
  const double acc_base = 1.0 / num_classes;
  if (auc_orig <= kAucBaseline || acc_orig <= acc_base) {
    return std::optional<double>();
  }
  const double num =
      std::max(0.0, (auc_orig - auc_eps) * (acc_orig - acc_base));
  const double den =
      std::max(0.0, (acc_orig - acc_eps) * (auc_orig - kAucBaseline));
  if (den == 0.0) return std::optional<double>(kPhiCap);
  return std::optional<double>(std::min(kPhiCap, num / den));
}

std::string FormatPhi(const std::optional<double>& phi) {
  return phi ? absl::StrFormat("%.15g", *phi) : std::string("n/a");
}

}  // namespace dpmi::metrics
