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

#ifndef DPMI_DATA_SPLITS_H_
#define DPMI_DATA_SPLITS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/data/dataset.h"

namespace dpmi::data {

using IndexSet = std::vector<std::size_t>;

struct ShadowSplit {
  IndexSet train;
  IndexSet test;
};

// Record indices (into one dataset) for a membership-inference experiment.
// Target train and test hold n records each and are disjoint; every shadow
// pair holds n + n distinct records from outside the target sets. Different
// shadows may share records.
struct AttackDataLayout {
  IndexSet target_train;
  IndexSet target_test;
  std::vector<ShadowSplit> shadows;
};

struct PartitionOptions {
  // Keep each class's share of the pool in every split (largest remainder).
  bool stratified = false;
};

// Samples a layout. When the dataset carries domain tags, train-side sets
// (target train, shadow train) come from domain 0 and test-side sets from
// domain 1, so a train/test distribution shift is preserved.
absl::StatusOr<AttackDataLayout> PartitionAttackData(
    const Dataset& dataset, std::size_t n, std::size_t shadows,
    std::uint64_t seed, const PartitionOptions& options = {});

// Named index sets: "target_train", "target_test", "shadow_<i>_train",
// "shadow_<i>_test".
using SplitSet = std::map<std::string, IndexSet>;

SplitSet ToSplitSet(const AttackDataLayout& layout);
absl::StatusOr<AttackDataLayout> FromSplitSet(const SplitSet& splits);

absl::StatusOr<SplitSet> MakeSplits(const Dataset& dataset, std::size_t n,
                                    std::size_t shadows, std::uint64_t seed,
                                    const PartitionOptions& options = {});

// JSON object of index arrays keyed by split name.
absl::Status SaveSplits(const SplitSet& splits, const std::string& path);
absl::StatusOr<SplitSet> LoadSplits(const std::string& path);

}  // namespace dpmi::data

#endif  // DPMI_DATA_SPLITS_H_
