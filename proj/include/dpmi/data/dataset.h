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

#ifndef DPMI_DATA_DATASET_H_
#define DPMI_DATA_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"

namespace dpmi::data {

enum class FeatureKind { kBinary, kReal, kImage };

std::string_view FeatureKindName(FeatureKind kind);
absl::StatusOr<FeatureKind> ParseFeatureKind(std::string_view name);

// Labeled records with a uniform feature width. Labels are dense class
// indices in [0, num_classes).
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  FeatureKind kind = FeatureKind::kReal;
  int num_classes = 0;
  // Original label values when the labels were re-indexed on load;
  // original_labels[k] is the source value of class k. Empty otherwise.
  std::vector<long long> original_labels;
  // Optional per-record domain tag for datasets whose train and test
  // distributions differ (0 = train-like, 1 = test-like). Empty when the
  // dataset has a single distribution.
  std::vector<std::uint8_t> domain;
  // Image side length for kImage datasets (features are side*side pixels).
  std::size_t image_side = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return features.cols(); }
  bool empty() const { return labels.empty(); }

  // Checks the structural invariants: row counts agree, labels in range,
  // binary values only 0/1, image values in [0,255], domain tags sized.
  absl::Status Validate() const;

  // Copies the given records (in the given order).
  Dataset Subset(std::span<const std::size_t> indices) const;

  // Per-class record counts.
  std::vector<std::size_t> ClassCounts() const;
};

// Concatenates two datasets with the same width, kind and class count.
absl::StatusOr<Dataset> Concatenate(const Dataset& a, const Dataset& b);

}  // namespace dpmi::data

#endif  // DPMI_DATA_DATASET_H_
