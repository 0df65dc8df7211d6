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

// Dataset CSV format: a header row `label,f0,f1,...` followed by one record
// per line. Image datasets add a sidecar `<stem>.json` next to the CSV with
// {"side": s, "classes": C}.

#ifndef DPMI_DATA_CSV_IO_H_
#define DPMI_DATA_CSV_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"

namespace dpmi::data {

// Reads a dataset. The label column may appear anywhere; every other column
// is a feature, in file order. Labels must be integers and are re-indexed
// densely in ascending order of their values (original values are kept in
// Dataset::original_labels). Errors name the 1-based line and the column.
absl::StatusOr<Dataset> LoadCsvDataset(const std::string& path,
                                       std::string_view label_column,
                                       FeatureKind kind);
absl::StatusOr<Dataset> ParseCsvDataset(std::string_view text,
                                        std::string_view label_column,
                                        FeatureKind kind);

// Writes `label,f0,...` with values printed to round-trip exactly. Labels
// are written as their original values when a mapping is present. Image
// datasets also get the sidecar.
absl::Status SaveCsvDataset(const Dataset& dataset, const std::string& path);

// Path of the sidecar for an image CSV: `dir/name.csv` -> `dir/name.json`.
std::string SidecarPath(const std::string& csv_path);

}  // namespace dpmi::data

#endif  // DPMI_DATA_CSV_IO_H_
