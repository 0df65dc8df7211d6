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

// Result rows, trade-off records and ROC series, and their CSV files.
//
// results.csv   one row per (experiment, privacy point, repeat, attack)
// tradeoff.csv  one row per (experiment, privacy point, attack): repeat
//               means, sample standard deviations and phi
// roc_<attack>_<token>.csv
//               long format `experiment_id,series,fpr,tpr`; series
//               `repeat_<r>` hold every repeat's curve on the 101-point FPR
//               grid and series `mean` their pointwise mean
// config.json   {experiment_id: configuration snapshot}
//
// Missing values are written as "n/a". Floating point values use %.15g.

#ifndef DPMI_RUNNER_RESULTS_H_
#define DPMI_RUNNER_RESULTS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/metrics/roc.h"

namespace dpmi::runner {

struct ResultRow {
  std::string experiment_id;
  std::string dataset;
  int num_classes = 0;
  std::string mode;
  std::optional<double> epsilon_i;
  // Composed local (ldp) or accounted (cdp) epsilon; n/a without privacy.
  std::optional<double> epsilon;
  std::optional<double> noise_multiplier;
  std::optional<double> clip_norm;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::optional<double> train_accuracy;
  std::optional<double> test_accuracy;
  std::string attack;
  std::optional<double> auc;
  std::optional<double> phi;
  // Empty on success; the failing stage's message otherwise.
  std::string error;
  double wall_seconds = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct TradeoffRecord {
  std::string experiment_id;
  std::string mode;
  std::optional<double> epsilon_i;
  std::optional<double> epsilon;
  std::optional<double> noise_multiplier;
  std::string attack;
  // Repeats that finished without error.
  std::size_t repeats = 0;
  std::optional<double> train_accuracy_mean, train_accuracy_stddev;
  std::optional<double> test_accuracy_mean, test_accuracy_stddev;
  std::optional<double> auc_mean, auc_stddev;
  std::optional<double> phi;

  friend bool operator==(const TradeoffRecord&, const TradeoffRecord&) = default;
};

struct RocSeries {
  std::string attack;
  // File token of the privacy point: "none", "epsi<eps_i>" or "z<z>".
  std::string token;
  // Per-repeat curves resampled onto the grid, in repeat order.
  std::vector<std::size_t> repeat_ids;
  std::vector<metrics::RocCurve> repeats;
  metrics::RocCurve mean;
};

const std::vector<std::string>& ResultColumns();
const std::vector<std::string>& TradeoffColumns();

std::string FormatNumber(double v);
std::string FormatOptional(const std::optional<double>& v);

// RFC 4180 field quoting when the value contains a comma, quote or newline.
std::string CsvField(const std::string& value);
// Splits one CSV line, honoring quoted fields.
absl::StatusOr<std::vector<std::string>> SplitCsvLine(const std::string& line);

std::string ResultRowLine(const ResultRow& row);
std::string TradeoffLine(const TradeoffRecord& record);

// Full file contents (header included).
std::string ResultsCsv(const std::vector<ResultRow>& rows);
std::string TradeoffCsv(const std::vector<TradeoffRecord>& records);
std::string RocCsv(const std::string& experiment_id, const RocSeries& series);

std::string RocFileName(const RocSeries& series);

absl::StatusOr<std::vector<ResultRow>> ParseResultsCsv(const std::string& text);
absl::StatusOr<std::vector<ResultRow>> ReadResults(const std::string& dir);
absl::StatusOr<std::vector<TradeoffRecord>> ParseTradeoffCsv(
    const std::string& text);

struct ExperimentOutput {
  std::string experiment_id;
  // DumpConfig() text of the configuration that produced the output.
  std::string config_json;
  std::vector<ResultRow> rows;
  std::vector<TradeoffRecord> tradeoffs;
  std::vector<RocSeries> rocs;
};

// Writes every file of one experiment into `dir` (created if needed). Rows
// of other experiments already in the files are kept in place. An
// experiment id that is already present is refused with AlreadyExists
// unless `force`, in which case its old rows are replaced.
absl::Status PersistResults(const ExperimentOutput& output,
                            const std::string& dir, bool force);

}  // namespace dpmi::runner

#endif  // DPMI_RUNNER_RESULTS_H_
