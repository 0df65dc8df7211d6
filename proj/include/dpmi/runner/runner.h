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

// Experiment orchestration.
//
// A job is one repeat at one privacy point: split the records, train the
// target (perturbing its training records first under ldp, privately under
// cdp), run the selected attacks and collect one ResultRow per attack.
// Repeat r uses the seed base_seed + r for every point, so the reference
// and all grid points of a repeat share their splits and differ only in
// the privacy mechanism.

#ifndef DPMI_RUNNER_RUNNER_H_
#define DPMI_RUNNER_RUNNER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"
#include "dpmi/data/splits.h"
#include "dpmi/dp/privacy_spec.h"
#include "dpmi/mi/attacks.h"
#include "dpmi/mi/training.h"
#include "dpmi/runner/config.h"
#include "dpmi/runner/results.h"

namespace dpmi::runner {

// The experiment's records. Generated datasets are drawn once from the
// dataset seed and shared by all repeats.
absl::StatusOr<data::Dataset> BuildDataset(const ExperimentConfig& config);

std::uint64_t RepeatSeed(const ExperimentConfig& config, std::size_t repeat);

struct PrivacyPoint {
  dp::PrivacySpec privacy;
  // "none", "epsi<eps_i>" or "z<z>".
  std::string token;
  bool reference = false;
};

std::string PointToken(const dp::PrivacySpec& privacy);

// The non-private reference (when requested) followed by the grid points,
// or by the configured privacy setting when there is no grid.
std::vector<PrivacyPoint> SweepPoints(const ExperimentConfig& config,
                                      bool include_reference);

struct JobResult {
  // One row per selected attack (bb before wb), error rows included.
  std::vector<ResultRow> rows;
  bool ok = false;
  data::AttackDataLayout layout;
  std::optional<mi::TrainedModel> target;
  std::vector<mi::AttackResult> attacks;
};

// Never fails as a whole: a failing stage turns into error rows.
JobResult RunJob(const ExperimentConfig& config, const data::Dataset& dataset,
                 const dp::PrivacySpec& privacy, std::size_t repeat,
                 std::size_t shadow_jobs = 1);

struct RunOptions {
  bool include_reference = true;
  // Jobs (point x repeat) running at once.
  std::size_t jobs = 1;
};

struct SweepResult {
  std::vector<PrivacyPoint> points;
  // jobs[p * repeats + r].
  std::vector<JobResult> jobs;
  ExperimentOutput output;
};

// Runs every point x repeat, then derives the trade-off records (phi from
// repeat means against the reference) and the ROC series.
absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const RunOptions& options);

// Mean and sample standard deviation (0 for a single value); nullopt for
// no values.
struct MeanStd {
  std::optional<double> mean;
  std::optional<double> stddev;
};
MeanStd Summarize(const std::vector<double>& values);

// Per-configuration table: mean ± stddev of accuracies, AUC and phi, with
// "attack ineffective" marking attacks whose reference AUC is at most 0.5.
// Empty results give "no data".
absl::StatusOr<std::string> ReportSummary(const std::string& results_dir);
std::string FormatSummary(const std::vector<ResultRow>& rows);

}  // namespace dpmi::runner

#endif  // DPMI_RUNNER_RUNNER_H_
