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

#include "dpmi/data/csv_io.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "nlohmann/json.hpp"

namespace dpmi::data {
namespace {

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status ReadSidecar(const std::string& csv_path, Dataset& d) {
  const std::string path = SidecarPath(csv_path);
  auto text = ReadFile(path);
  if (!text.ok()) {
    return absl::NotFoundError(
        absl::StrCat("image dataset needs sidecar ", path));
  }
  nlohmann::json meta = nlohmann::json::parse(*text, nullptr, false);
  if (meta.is_discarded() || !meta.is_object() || !meta.contains("side") ||
      !meta["side"].is_number_unsigned()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": expected an object with an integer \"side\""));
  }
  d.image_side = meta["side"].get<std::size_t>();
  if (meta.contains("classes") && meta["classes"].is_number_integer()) {
    const int classes = meta["classes"].get<int>();
    if (classes < d.num_classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": declares ", classes, " classes but the CSV has ",
          d.num_classes));
    }
    d.num_classes = classes;
  }
  return absl::OkStatus();
}

}  // namespace

std::string SidecarPath(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

absl::StatusOr<Dataset> ParseCsvDataset(std::string_view input,
                                        std::string_view label_column,
                                        FeatureKind kind) {
  const absl::string_view text(input.data(), input.size());
  const absl::string_view label_name(label_column.data(), label_column.size());
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  while (!lines.empty() &&
         absl::StripTrailingAsciiWhitespace(lines.back()).empty()) {
    lines.pop_back();
  }
  if (lines.empty()) return absl::InvalidArgumentError("CSV has no header");

  std::vector<absl::string_view> header =
      absl::StrSplit(absl::StripTrailingAsciiWhitespace(lines[0]), ',');
  std::size_t label_index = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (absl::StripAsciiWhitespace(header[c]) == label_name) label_index = c;
  }
  if (label_index == header.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line 1: label column '", std::string(label_column), "' not found"));
  }

  const std::size_t width = header.size() - 1;
  Dataset d;
  d.kind = kind;
  d.features = Matrix(lines.size() - 1, width);
  std::vector<long long> raw_labels;
  raw_labels.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::size_t line_no = r + 1;
    std::vector<absl::string_view> cells =
        absl::StrSplit(absl::StripTrailingAsciiWhitespace(lines[r]), ',');
    if (cells.size() != header.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected ", header.size(), " cells, found ",
          cells.size()));
    }
    auto row = d.features.row(r - 1);
    std::size_t f = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const absl::string_view cell = absl::StripAsciiWhitespace(cells[c]);
      if (c == label_index) {
        long long label = 0;
        if (!absl::SimpleAtoi(cell, &label)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "line ", line_no, ", column '", std::string(header[c]),
              "': label '", std::string(cell), "' is not an integer"));
        }
        raw_labels.push_back(label);
        continue;
      }
      double v = 0.0;
      if (!absl::SimpleAtod(cell, &v) || !std::isfinite(v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_no, ", column '", std::string(header[c]),
            "': non-numeric value '", std::string(cell), "'"));
      }
      if (kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_no, ", column '", std::string(header[c]),
            "': binary feature has value ", std::string(cell)));
      }
      if (kind == FeatureKind::kImage && (v < 0.0 || v > 255.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_no, ", column '", std::string(header[c]),
            "': pixel value ", std::string(cell), " outside [0,255]"));
      }
      row[f++] = v;
    }
  }

  std::vector<long long> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::map<long long, int> index;
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    index[distinct[k]] = static_cast<int>(k);
  }
  d.labels.reserve(raw_labels.size());
  for (long long v : raw_labels) d.labels.push_back(index[v]);
  d.num_classes = static_cast<int>(distinct.size());
  d.original_labels = std::move(distinct);
  return d;
}

absl::StatusOr<Dataset> LoadCsvDataset(const std::string& path,
                                       std::string_view label_column,
                                       FeatureKind kind) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto d = ParseCsvDataset(*text, label_column, kind);
  if (!d.ok()) {
    return absl::Status(d.status().code(),
                        absl::StrCat(path, ": ", d.status().message()));
  }
  if (kind == FeatureKind::kImage) {
    if (absl::Status s = ReadSidecar(path, *d); !s.ok()) return s;
  }
  if (absl::Status s = d->Validate(); !s.ok()) {
    return absl::Status(s.code(), absl::StrCat(path, ": ", s.message()));
  }
  return d;
}

absl::Status SaveCsvDataset(const Dataset& dataset, const std::string& path) {
  if (absl::Status s = dataset.Validate(); !s.ok()) return s;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  std::string line = "label";
  for (std::size_t j = 0; j < dataset.width(); ++j) {
    absl::StrAppend(&line, ",f", j);
  }
  out << line << '\n';
  const bool mapped = !dataset.original_labels.empty();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset.labels[i];
    line = mapped ? absl::StrCat(dataset.original_labels[label])
                  : absl::StrCat(label);
    for (double v : dataset.features.row(i)) {
      absl::StrAppend(&line, ",", absl::StrFormat("%.17g", v));
    }
    out << line << '\n';
  }
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  out.close();
  if (dataset.kind == FeatureKind::kImage) {
    const std::string sidecar = SidecarPath(path);
    std::ofstream meta(sidecar, std::ios::trunc);
    if (!meta) {
      return absl::UnavailableError(absl::StrCat("cannot write ", sidecar));
    }
    nlohmann::json j = {{"side", dataset.image_side},
                        {"classes", dataset.num_classes}};
    meta << j.dump(2) << '\n';
    if (!meta) return absl::DataLossError(absl::StrCat("write failed: ", sidecar));
  }
  return absl::OkStatus();
}

}  // namespace dpmi::data
