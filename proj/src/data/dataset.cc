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

#include "dpmi/data/dataset.h"

#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"

namespace dpmi::data {

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kBinary:
      return "binary";
    case FeatureKind::kReal:
      return "real";
    case FeatureKind::kImage:
      return "image";
  }
  return "unknown";
}

absl::StatusOr<FeatureKind> ParseFeatureKind(std::string_view name) {
  if (name == "binary") return FeatureKind::kBinary;
  if (name == "real") return FeatureKind::kReal;
  if (name == "image") return FeatureKind::kImage;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown feature kind '", std::string(name),
                   "' (expected binary, real or image)"));
}

absl::Status Dataset::Validate() const {
  if (features.rows() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature rows (", features.rows(),
                     ") and label count (", labels.size(), ") differ"));
  }
  if (num_classes < 1) {
    return absl::InvalidArgumentError("num_classes must be positive");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record ", i, ": label ", labels[i], " outside [0, ", num_classes,
          ")"));
    }
  }
  if (!domain.empty() && domain.size() != labels.size()) {
    return absl::InvalidArgumentError("domain tags must cover every record");
  }
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      const double v = features(r, c);
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("record ", r, " column ", c, ": non-finite value"));
      }
      if (kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "record ", r, " column ", c, ": binary feature has value ", v));
      }
      if (kind == FeatureKind::kImage && (v < 0.0 || v > 255.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "record ", r, " column ", c, ": pixel value ", v,
            " outside [0,255]"));
      }
    }
  }
  if (kind == FeatureKind::kImage && image_side * image_side != width()) {
    return absl::InvalidArgumentError(
        absl::StrCat("image side ", image_side, " does not match width ",
                     width()));
  }
  return absl::OkStatus();
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.kind = kind;
  out.num_classes = num_classes;
  out.original_labels = original_labels;
  out.image_side = image_side;
  out.features = Matrix(indices.size(), width());
  out.labels.reserve(indices.size());
  if (!domain.empty()) out.domain.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = features.row(indices[i]);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
    out.labels.push_back(labels[indices[i]]);
    if (!domain.empty()) out.domain.push_back(domain[indices[i]]);
  }
  return out;
}

std::vector<std::size_t> Dataset::ClassCounts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

absl::StatusOr<Dataset> Concatenate(const Dataset& a, const Dataset& b) {
  if (a.width() != b.width() || a.kind != b.kind ||
      a.num_classes != b.num_classes) {
    return absl::InvalidArgumentError(
        "datasets differ in width, kind or class count");
  }
  Dataset out = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.features.AppendRow(b.features.row(i));
    out.labels.push_back(b.labels[i]);
  }
  if (!a.domain.empty() || !b.domain.empty()) {
    out.domain = a.domain.empty() ? std::vector<std::uint8_t>(a.size(), 0)
                                  : a.domain;
    if (b.domain.empty()) {
      out.domain.insert(out.domain.end(), b.size(), 0);
    } else {
      out.domain.insert(out.domain.end(), b.domain.begin(), b.domain.end());
    }
  }
  return out;
}

}  // namespace dpmi::data
