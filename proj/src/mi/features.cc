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

#include "dpmi/mi/features.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpmi/nn/backprop.h"

namespace dpmi::mi {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void FnvBytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

absl::Status CheckRecords(const nn::Network& model,
                          const data::Dataset& records,
                          std::span<const std::size_t> ids) {
  if (records.width() != model.input_size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "records have width ", records.width(), " but the model expects ",
        model.input_size()));
  }
  if (static_cast<std::size_t>(records.num_classes) != model.num_classes()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "records have ", records.num_classes, " classes but the model has ",
        model.num_classes()));
  }
  for (std::size_t id : ids) {
    if (id >= records.size()) {
      return absl::OutOfRangeError(absl::StrCat(
          "record id ", id, " outside dataset of ", records.size()));
    }
  }
  return absl::OkStatus();
}

FeatureBlock EmptyBlock(const data::Dataset& records,
                        std::span<const std::size_t> ids, std::size_t width) {
  FeatureBlock block;
  block.features = Matrix(ids.size(), width);
  block.record_ids.assign(ids.begin(), ids.end());
  block.classes.reserve(ids.size());
  for (std::size_t id : ids) block.classes.push_back(records.labels[id]);
  block.input_hash = HashRecords(records, ids);
  return block;
}

}  // namespace

std::string_view AttackKindName(AttackKind kind) {
  return kind == AttackKind::kBlackBox ? "bb" : "wb";
}

std::uint64_t HashRecords(const data::Dataset& records,
                          std::span<const std::size_t> ids) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t id : ids) {
    const auto row = records.features.row(id);
    FnvBytes(h, row.data(), row.size() * sizeof(double));
    const std::int32_t label = records.labels[id];
    FnvBytes(h, &label, sizeof(label));
  }
  return h;
}

std::size_t FeatureWidth(AttackKind kind, std::size_t num_classes) {
  return kind == AttackKind::kBlackBox ? num_classes : 3 * num_classes + 2;
}

absl::StatusOr<FeatureBlock> ExtractBbFeatures(
    const nn::Network& model, const data::Dataset& records,
    std::span<const std::size_t> ids) {
  if (absl::Status s = CheckRecords(model, records, ids); !s.ok()) return s;
  FeatureBlock block = EmptyBlock(records, ids, model.num_classes());
  nn::ExampleWorkspace ws(model);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ws.Forward(model, records.features.row(ids[i]));
    const auto p = ws.softmax();
    std::copy(p.begin(), p.end(), block.features.row(i).begin());
  }
  return block;
}

absl::StatusOr<FeatureBlock> ExtractWbFeatures(
    const nn::Network& model, const data::Dataset& records,
    std::span<const std::size_t> ids) {
  if (absl::Status s = CheckRecords(model, records, ids); !s.ok()) return s;
  const std::size_t classes = model.num_classes();
  FeatureBlock block =
      EmptyBlock(records, ids, FeatureWidth(AttackKind::kWhiteBox, classes));
  const std::size_t last = model.num_layers() - 1;
  const std::size_t in = model.layer(last).in;
  const std::size_t w_off = model.weight_offset(last);
  const std::size_t b_off = model.bias_offset(last);

  nn::ExampleWorkspace ws(model);
  std::vector<double> grad(model.num_params());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int label = records.labels[ids[i]];
    const double loss =
        ws.Backprop(model, records.features.row(ids[i]), label, grad);
    auto row = block.features.row(i);
    std::size_t col = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      row[col++] = static_cast<int>(c) == label ? 1.0 : 0.0;
    }
    const auto p = ws.softmax();
    for (std::size_t c = 0; c < classes; ++c) row[col++] = p[c];
    row[col++] = loss;
    const std::size_t total_col = col++;
    double total = 0.0;
    for (std::size_t r = 0; r < classes; ++r) {
      double sq = grad[b_off + r] * grad[b_off + r];
      const double* w = grad.data() + w_off + r * in;
      for (std::size_t j = 0; j < in; ++j) sq += w[j] * w[j];
      total += sq;
      row[col++] = std::sqrt(sq);
    }
    row[total_col] = std::sqrt(total);
  }
  return block;
}

absl::StatusOr<FeatureBlock> ExtractFeatures(AttackKind kind,
                                             const nn::Network& model,
                                             const data::Dataset& records,
                                             std::span<const std::size_t> ids) {
  return kind == AttackKind::kBlackBox ? ExtractBbFeatures(model, records, ids)
                                       : ExtractWbFeatures(model, records, ids);
}

LabeledFeatures Label(FeatureBlock block, std::uint8_t flag) {
  LabeledFeatures out;
  out.flags.assign(block.size(), flag);
  out.block = std::move(block);
  return out;
}

std::uint64_t CombineHashes(std::uint64_t first, std::uint64_t second) {
  FnvBytes(first, &second, sizeof(second));
  return first;
}

absl::StatusOr<LabeledFeatures> Merge(const LabeledFeatures& a,
                                      const LabeledFeatures& b) {
  if (a.block.size() > 0 && b.block.size() > 0 &&
      a.block.features.cols() != b.block.features.cols()) {
    return absl::InvalidArgumentError("feature widths differ");
  }
  LabeledFeatures out = a;
  if (out.block.size() == 0) out.block.features = Matrix(0, b.block.features.cols());
  for (std::size_t i = 0; i < b.block.size(); ++i) {
    out.block.features.AppendRow(b.block.features.row(i));
  }
  out.block.classes.insert(out.block.classes.end(), b.block.classes.begin(),
                           b.block.classes.end());
  out.block.record_ids.insert(out.block.record_ids.end(),
                              b.block.record_ids.begin(),
                              b.block.record_ids.end());
  out.flags.insert(out.flags.end(), b.flags.begin(), b.flags.end());
  out.block.input_hash = CombineHashes(a.block.input_hash, b.block.input_hash);
  return out;
}

absl::Status WriteFeatureCsv(const LabeledFeatures& features,
                             const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  std::string line = "record_id,class,flag";
  for (std::size_t j = 0; j < features.block.features.cols(); ++j) {
    absl::StrAppend(&line, ",x", j);
  }
  out << line << '\n';
  for (std::size_t i = 0; i < features.block.size(); ++i) {
    line = absl::StrCat(features.block.record_ids[i], ",",
                        features.block.classes[i], ",",
                        features.flags[i] ? "in" : "out");
    for (double v : features.block.features.row(i)) {
      absl::StrAppend(&line, ",", absl::StrFormat("%.17g", v));
    }
    out << line << '\n';
  }
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace dpmi::mi
