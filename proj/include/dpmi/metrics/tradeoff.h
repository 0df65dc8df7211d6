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

// Relative privacy-accuracy trade-off
//
//   phi = min(2, max(0, (AUC_o - AUC_e)(ACC_o - 1/C))
//                / max(0, (ACC_o - ACC_e)(AUC_o - 0.5)))
//
// i.e. the relative drop of the attack AUC towards its 0.5 baseline divided
// by the relative drop of the test accuracy towards 1/C. A zero denominator
// (accuracy did not drop) gives the cap.

#ifndef DPMI_METRICS_TRADEOFF_H_
#define DPMI_METRICS_TRADEOFF_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"

namespace dpmi::metrics {

inline constexpr double kPhiCap = 2.0;
inline constexpr double kAucBaseline = 0.5;

// nullopt when the reference has no privacy gap to lose (AUC_o <= 0.5 or
// ACC_o <= 1/C); errors on inputs outside [0,1] or fewer than 2 classes.
absl::StatusOr<std::optional<double>> Phi(double auc_orig, double auc_eps,
                                          double acc_orig, double acc_eps,
                                          int num_classes);

// "n/a" for nullopt, otherwise %.15g.
std::string FormatPhi(const std::optional<double>& phi);

}  // namespace dpmi::metrics

#endif  // DPMI_METRICS_TRADEOFF_H_
