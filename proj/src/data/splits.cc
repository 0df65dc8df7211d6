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

#include "dpmi/data/splits.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "dpmi/common/rng.h"
#include "dpmi/data/generators.h"
#include "nlohmann/json.hpp"

namespace dpmi::data {
namespace {

struct Taken {
  IndexSet taken;
  IndexSet rest;
};

// Takes n records from an already shuffled pool, in pool order. Stratified
// mode fills per-class quotas proportional to the pool's class counts.
Taken Take(const IndexSet& pool, std::size_t n, const Dataset& d,
           bool stratified) {
  Taken out;
  if (!stratified) {
    out.taken.assign(pool.begin(), pool.begin() + n);
    out.rest.assign(pool.begin() + n, pool.end());
    return out;
  }
  std::vector<double> counts(d.num_classes, 0.0);
  for (std::size_t i : pool) counts[d.labels[i]] += 1.0;
  std::vector<std::size_t> quota = LargestRemainder(counts, n);
  for (std::size_t i : pool) {
    std::size_t& q = quota[d.labels[i]];
    if (q > 0) {
      --q;
      out.taken.push_back(i);
    } else {
      out.rest.push_back(i);
    }
  }
  return out;
}

IndexSet Shuffled(IndexSet pool, Rng& rng) {
  rng.Shuffle(pool);
  return pool;
}

}  // namespace

absl::StatusOr<AttackDataLayout> PartitionAttackData(
    const Dataset& dataset, std::size_t n, std::size_t shadows,
    std::uint64_t seed, const PartitionOptions& options) {
  if (n == 0) return absl::InvalidArgumentError("target size n must be > 0");
  const bool split_domains = !dataset.domain.empty();
  IndexSet train_pool, test_pool;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (split_domains && dataset.domain[i] != 0) {
      test_pool.push_back(i);
    } else {
      train_pool.push_back(i);
    }
  }
  const std::size_t per_side = shadows > 0 ? 2 * n : n;
  if (split_domains) {
    if (train_pool.size() < per_side || test_pool.size() < per_side) {
      return absl::InvalidArgumentError(absl::StrCat(
          "insufficient records: need ", per_side,
          " per domain for n=", n, " with ", shadows, " shadows, have ",
          train_pool.size(), " train-like and ", test_pool.size(),
          " test-like"));
    }
  } else if (train_pool.size() < 2 * per_side) {
    return absl::InvalidArgumentError(absl::StrCat(
        "insufficient records: need ", 2 * per_side, " for n=", n, " with ",
        shadows, " shadows, have ", train_pool.size()));
  }

  Rng rng(seed);
  const bool strat = options.stratified;
  AttackDataLayout layout;
  Taken tt = Take(Shuffled(train_pool, rng), n, dataset, strat);
  layout.target_train = std::move(tt.taken);
  IndexSet rest_train, rest_test;
  if (split_domains) {
    Taken te = Take(Shuffled(test_pool, rng), n, dataset, strat);
    layout.target_test = std::move(te.taken);
    rest_train = std::move(tt.rest);
    rest_test = std::move(te.rest);
  } else {
    Taken te = Take(tt.rest, n, dataset, strat);
    layout.target_test = std::move(te.taken);
    rest_train = std::move(te.rest);
  }

  for (std::size_t s = 0; s < shadows; ++s) {
    Rng shadow_rng = rng.Fork(s + 1);
    ShadowSplit split;
    Taken st = Take(Shuffled(rest_train, shadow_rng), n, dataset, strat);
    split.train = std::move(st.taken);
    if (split_domains) {
      split.test =
          Take(Shuffled(rest_test, shadow_rng), n, dataset, strat).taken;
    } else {
      split.test = Take(st.rest, n, dataset, strat).taken;
    }
    layout.shadows.push_back(std::move(split));
  }
  return layout;
}

SplitSet ToSplitSet(const AttackDataLayout& layout) {
  SplitSet out;
  out["target_train"] = layout.target_train;
  out["target_test"] = layout.target_test;
  for (std::size_t s = 0; s < layout.shadows.size(); ++s) {
    out[absl::StrCat("shadow_", s, "_train")] = layout.shadows[s].train;
    out[absl::StrCat("shadow_", s, "_test")] = layout.shadows[s].test;
  }
  return out;
}

absl::StatusOr<AttackDataLayout> FromSplitSet(const SplitSet& splits) {
  AttackDataLayout layout;
  auto train = splits.find("target_train");
  auto test = splits.find("target_test");
  if (train == splits.end() || test == splits.end()) {
    return absl::InvalidArgumentError(
        "split set needs target_train and target_test");
  }
  layout.target_train = train->second;
  layout.target_test = test->second;
  for (std::size_t s = 0;; ++s) {
    auto st = splits.find(absl::StrCat("shadow_", s, "_train"));
    auto se = splits.find(absl::StrCat("shadow_", s, "_test"));
    if (st == splits.end() && se == splits.end()) break;
    if (st == splits.end() || se == splits.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("shadow ", s, " is missing its train or test half"));
    }
    layout.shadows.push_back({st->second, se->second});
  }
  return layout;
}

absl::StatusOr<SplitSet> MakeSplits(const Dataset& dataset, std::size_t n,
                                    std::size_t shadows, std::uint64_t seed,
                                    const PartitionOptions& options) {
  auto layout = PartitionAttackData(dataset, n, shadows, seed, options);
  if (!layout.ok()) return layout.status();
  return ToSplitSet(*layout);
}

absl::Status SaveSplits(const SplitSet& splits, const std::string& path) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, indices] : splits) j[name] = indices;
  std::ofstream out(path, std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << j.dump() << '\n';
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<SplitSet> LoadSplits(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": expected a JSON object of index arrays"));
  }
  SplitSet out;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": split '", name, "' is not an array"));
    }
    IndexSet indices;
    for (const auto& v : value) {
      if (!v.is_number_unsigned()) {
        return absl::InvalidArgumentError(absl::StrCat(
            path, ": split '", name, "' holds a non-index value"));
      }
      indices.push_back(v.get<std::size_t>());
    }
    out[name] = std::move(indices);
  }
  return out;
}

}  // namespace dpmi::data
