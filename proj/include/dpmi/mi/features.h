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

// Attack features. Extraction never sees membership: flags are attached
// afterwards from the layout bookkeeping (see Label).

#ifndef DPMI_MI_FEATURES_H_
#define DPMI_MI_FEATURES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"
#include "dpmi/data/dataset.h"
#include "dpmi/nn/network.h"

namespace dpmi::mi {

enum class AttackKind { kBlackBox, kWhiteBox };

std::string_view AttackKindName(AttackKind kind);  // "bb" / "wb"

struct FeatureBlock {
  Matrix features;
  // True class of every record.
  std::vector<int> classes;
  // Index of every record in the source dataset.
  std::vector<std::size_t> record_ids;
  // HashRecords of the records the forward passes consumed.
  std::uint64_t input_hash = 0;

  std::size_t size() const { return classes.size(); }
};

struct LabeledFeatures {
  FeatureBlock block;
  // 1 = member ("in"), 0 = non-member ("out").
  std::vector<std::uint8_t> flags;
};

// FNV-1a over the feature bits and labels of the selected records.
std::uint64_t HashRecords(const data::Dataset& records,
                          std::span<const std::size_t> ids);

// Softmax vector of every selected record (width C).
absl::StatusOr<FeatureBlock> ExtractBbFeatures(
    const nn::Network& model, const data::Dataset& records,
    std::span<const std::size_t> ids);

// One-hot label (C), softmax (C), cross-entropy loss (1), L2 norm of the
// final layer's gradient (1) and the L2 norm of each of its output rows,
// bias included (C): width 3C + 2.
absl::StatusOr<FeatureBlock> ExtractWbFeatures(
    const nn::Network& model, const data::Dataset& records,
    std::span<const std::size_t> ids);

std::size_t FeatureWidth(AttackKind kind, std::size_t num_classes);

absl::StatusOr<FeatureBlock> ExtractFeatures(AttackKind kind,
                                             const nn::Network& model,
                                             const data::Dataset& records,
                                             std::span<const std::size_t> ids);

// Attaches a constant flag to every row.
LabeledFeatures Label(FeatureBlock block, std::uint8_t flag);

// Hash of a concatenation given the hashes of its parts.
std::uint64_t CombineHashes(std::uint64_t first, std::uint64_t second);

// Row-wise concatenation; the result's hash is CombineHashes of the inputs.
absl::StatusOr<LabeledFeatures> Merge(const LabeledFeatures& a,
                                      const LabeledFeatures& b);

// CSV with header record_id,class,flag,x0,x1,...; flag is "in" or "out".
absl::Status WriteFeatureCsv(const LabeledFeatures& features,
                             const std::string& path);

}  // namespace dpmi::mi

#endif  // DPMI_MI_FEATURES_H_
