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

#include "dpmi/runner/results.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "nlohmann/json.hpp"

namespace dpmi::runner {
namespace {

namespace fs = std::filesystem;

constexpr char kNa[] = "n/a";
constexpr char kResultsFile[] = "results.csv";
constexpr char kTradeoffFile[] = "tradeoff.csv";
constexpr char kConfigFile[] = "config.json";

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::UnavailableError(absl::StrCat("cannot read ", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::Status WriteFileAtomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(absl::StrCat("cannot write ", tmp.string()));
    }
    out << text;
    if (!out) {
      return absl::DataLossError(absl::StrCat("write failed: ", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat(
        "cannot move ", tmp.string(), " to ", path.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// Experiment ids found in a keyed CSV file (first column).
absl::StatusOr<bool> FileHasId(const fs::path& path, const std::string& id) {
  if (!fs::exists(path)) return false;
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  const auto lines = Lines(*text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = SplitCsvLine(lines[i]);
    if (!fields.ok()) {
      return absl::DataLossError(absl::StrCat(path.string(), " line ", i + 1,
                                              ": ", fields.status().message()));
    }
    if (!fields->empty() && (*fields)[0] == id) return true;
  }
  return false;
}

// Rewrites `path` keeping rows of other experiments and appending `body`.
// An empty body with no surviving rows removes the file.
absl::Status RewriteKeyed(const fs::path& path, const std::string& header,
                          const std::string& id, const std::string& body) {
  std::string text = header + "\n";
  bool has_rows = !body.empty();
  if (fs::exists(path)) {
    auto old = ReadFile(path);
    if (!old.ok()) return old.status();
    const auto lines = Lines(*old);
    if (lines.empty() || lines[0] != header) {
      return absl::DataLossError(absl::StrCat(
          path.string(), ": header does not match, refusing to append"));
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = SplitCsvLine(lines[i]);
      if (!fields.ok()) {
        return absl::DataLossError(absl::StrCat(
            path.string(), " line ", i + 1, ": ", fields.status().message()));
      }
      if (!fields->empty() && (*fields)[0] == id) continue;
      absl::StrAppend(&text, lines[i], "\n");
      has_rows = true;
    }
  }
  if (!has_rows) {
    std::error_code ec;
    fs::remove(path, ec);
    return absl::OkStatus();
  }
  text += body;
  return WriteFileAtomic(path, text);
}

absl::StatusOr<std::optional<double>> ParseOptional(const std::string& field,
                                                    std::string_view column) {
  if (field == kNa) return std::optional<double>();
  double v = 0.0;
  if (!absl::SimpleAtod(field, &v)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "column ", std::string(column), ": '", field, "' is not a number"));
  }
  return std::optional<double>(v);
}

// Column lookup by header name, so reordered or extra columns still load.
class Record {
 public:
  Record(const std::map<std::string, std::size_t>& index,
         const std::vector<std::string>& fields)
      : index_(index), fields_(fields) {}

  const std::string& Text(const std::string& column) const {
    return fields_[index_.at(column)];
  }

  template <typename T>
  absl::Status Integer(const std::string& column, T& out) const {
    if (!absl::SimpleAtoi(Text(column), &out)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "column ", column, ": '", Text(column), "' is not an integer"));
    }
    return absl::OkStatus();
  }

  absl::Status Optional(const std::string& column,
                        std::optional<double>& out) const {
    auto v = ParseOptional(Text(column), column);
    if (!v.ok()) return v.status();
    out = *v;
    return absl::OkStatus();
  }

  absl::Status Required(const std::string& column, double& out) const {
    std::optional<double> v;
    if (absl::Status s = Optional(column, v); !s.ok()) return s;
    if (!v) {
      return absl::InvalidArgumentError(
          absl::StrCat("column ", column, " must not be n/a"));
    }
    out = *v;
    return absl::OkStatus();
  }

 private:
  const std::map<std::string, std::size_t>& index_;
  const std::vector<std::string>& fields_;
};

// Parses a CSV with a mandatory header containing `required` columns.
template <typename T, typename Fn>
absl::StatusOr<std::vector<T>> ParseTable(
    const std::string& text, const std::vector<std::string>& required,
    const Fn& parse_row) {
  const auto lines = Lines(text);
  if (lines.empty()) return absl::InvalidArgumentError("missing header row");
  auto header = SplitCsvLine(lines[0]);
  if (!header.ok()) return header.status();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header->size(); ++i) index[(*header)[i]] = i;
  for (const std::string& c : required) {
    if (!index.contains(c)) {
      return absl::InvalidArgumentError(
          absl::StrCat("header lacks column \"", c, "\""));
    }
  }
  std::vector<T> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = SplitCsvLine(lines[i]);
    absl::Status s = fields.status();
    if (s.ok() && fields->size() != header->size()) {
      s = absl::InvalidArgumentError(absl::StrCat(
          fields->size(), " fields, header has ", header->size()));
    }
    T value;
    if (s.ok()) s = parse_row(Record(index, *fields), value);
    if (!s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", i + 1, ": ", s.message()));
    }
    out.push_back(std::move(value));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ResultColumns() {
  static const auto* columns = new std::vector<std::string>{
      "experiment_id", "dataset", "classes",   "mode",      "epsilon_i",
      "epsilon",       "z",       "clip_norm", "repeat",    "seed",
      "train_acc",     "test_acc", "attack",   "auc",       "phi",
      "error",         "wall_seconds"};
  return *columns;
}

const std::vector<std::string>& TradeoffColumns() {
  static const auto* columns = new std::vector<std::string>{
      "experiment_id",  "mode",          "epsilon_i",      "epsilon",
      "z",              "attack",        "repeats",        "train_acc_mean",
      "train_acc_stddev", "test_acc_mean", "test_acc_stddev", "auc_mean",
      "auc_stddev",     "phi"};
  return *columns;
}

std::string FormatNumber(double v) {
  if (!std::isfinite(v)) return kNa;
  return absl::StrFormat("%.15g", v);
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatNumber(*v) : std::string(kNa);
}

std::string CsvField(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

absl::StatusOr<std::vector<std::string>> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else if (c == '"' && cur.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else {
      cur += c;
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string ResultRowLine(const ResultRow& r) {
  return absl::StrJoin(
      {CsvField(r.experiment_id), CsvField(r.dataset),
       absl::StrCat(r.num_classes), CsvField(r.mode),
       FormatOptional(r.epsilon_i), FormatOptional(r.epsilon),
       FormatOptional(r.noise_multiplier), FormatOptional(r.clip_norm),
       absl::StrCat(r.repeat), absl::StrCat(r.seed),
       FormatOptional(r.train_accuracy), FormatOptional(r.test_accuracy),
       CsvField(r.attack), FormatOptional(r.auc), FormatOptional(r.phi),
       CsvField(r.error), absl::StrFormat("%.3f", r.wall_seconds)},
      ",");
}

std::string TradeoffLine(const TradeoffRecord& t) {
  return absl::StrJoin(
      {CsvField(t.experiment_id), CsvField(t.mode), FormatOptional(t.epsilon_i),
       FormatOptional(t.epsilon), FormatOptional(t.noise_multiplier),
       CsvField(t.attack), absl::StrCat(t.repeats),
       FormatOptional(t.train_accuracy_mean),
       FormatOptional(t.train_accuracy_stddev),
       FormatOptional(t.test_accuracy_mean),
       FormatOptional(t.test_accuracy_stddev), FormatOptional(t.auc_mean),
       FormatOptional(t.auc_stddev), FormatOptional(t.phi)},
      ",");
}

std::string ResultsCsv(const std::vector<ResultRow>& rows) {
  std::string out = absl::StrJoin(ResultColumns(), ",") + "\n";
  for (const auto& r : rows) absl::StrAppend(&out, ResultRowLine(r), "\n");
  return out;
}

std::string TradeoffCsv(const std::vector<TradeoffRecord>& records) {
  std::string out = absl::StrJoin(TradeoffColumns(), ",") + "\n";
  for (const auto& t : records) absl::StrAppend(&out, TradeoffLine(t), "\n");
  return out;
}

namespace {

void AppendCurve(std::string& out, const std::string& id,
                 const std::string& series, const metrics::RocCurve& curve) {
  for (const auto& p : curve.points) {
    absl::StrAppend(&out, CsvField(id), ",", series, ",", FormatNumber(p.fpr),
                    ",", FormatNumber(p.tpr), "\n");
  }
}

constexpr char kRocHeader[] = "experiment_id,series,fpr,tpr";

std::string RocBody(const std::string& id, const RocSeries& series) {
  std::string out;
  for (std::size_t r = 0; r < series.repeats.size(); ++r) {
    AppendCurve(out, id, absl::StrCat("repeat_", series.repeat_ids[r]),
                series.repeats[r]);
  }
  AppendCurve(out, id, "mean", series.mean);
  return out;
}

}  // namespace

std::string RocCsv(const std::string& experiment_id, const RocSeries& series) {
  return absl::StrCat(kRocHeader, "\n", RocBody(experiment_id, series));
}

std::string RocFileName(const RocSeries& series) {
  return absl::StrCat("roc_", series.attack, "_", series.token, ".csv");
}

absl::StatusOr<std::vector<ResultRow>> ParseResultsCsv(const std::string& text) {
  return ParseTable<ResultRow>(
      text, ResultColumns(), [](const Record& rec, ResultRow& r) {
        r.experiment_id = rec.Text("experiment_id");
        r.dataset = rec.Text("dataset");
        r.mode = rec.Text("mode");
        r.attack = rec.Text("attack");
        r.error = rec.Text("error");
        absl::Status s = rec.Integer("classes", r.num_classes);
        if (s.ok()) s = rec.Integer("repeat", r.repeat);
        if (s.ok()) s = rec.Integer("seed", r.seed);
        if (s.ok()) s = rec.Optional("epsilon_i", r.epsilon_i);
        if (s.ok()) s = rec.Optional("epsilon", r.epsilon);
        if (s.ok()) s = rec.Optional("z", r.noise_multiplier);
        if (s.ok()) s = rec.Optional("clip_norm", r.clip_norm);
        if (s.ok()) s = rec.Optional("train_acc", r.train_accuracy);
        if (s.ok()) s = rec.Optional("test_acc", r.test_accuracy);
        if (s.ok()) s = rec.Optional("auc", r.auc);
        if (s.ok()) s = rec.Optional("phi", r.phi);
        if (s.ok()) s = rec.Required("wall_seconds", r.wall_seconds);
        return s;
      });
}

absl::StatusOr<std::vector<ResultRow>> ReadResults(const std::string& dir) {
  const fs::path path = fs::path(dir) / kResultsFile;
  if (!fs::exists(path)) {
    return absl::NotFoundError(absl::StrCat("no ", path.string()));
  }
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto rows = ParseResultsCsv(*text);
  if (!rows.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), ": ", rows.status().message()));
  }
  return rows;
}

absl::StatusOr<std::vector<TradeoffRecord>> ParseTradeoffCsv(
    const std::string& text) {
  return ParseTable<TradeoffRecord>(
      text, TradeoffColumns(), [](const Record& rec, TradeoffRecord& t) {
        t.experiment_id = rec.Text("experiment_id");
        t.mode = rec.Text("mode");
        t.attack = rec.Text("attack");
        absl::Status s = rec.Integer("repeats", t.repeats);
        if (s.ok()) s = rec.Optional("epsilon_i", t.epsilon_i);
        if (s.ok()) s = rec.Optional("epsilon", t.epsilon);
        if (s.ok()) s = rec.Optional("z", t.noise_multiplier);
        if (s.ok()) s = rec.Optional("train_acc_mean", t.train_accuracy_mean);
        if (s.ok()) s = rec.Optional("train_acc_stddev", t.train_accuracy_stddev);
        if (s.ok()) s = rec.Optional("test_acc_mean", t.test_accuracy_mean);
        if (s.ok()) s = rec.Optional("test_acc_stddev", t.test_accuracy_stddev);
        if (s.ok()) s = rec.Optional("auc_mean", t.auc_mean);
        if (s.ok()) s = rec.Optional("auc_stddev", t.auc_stddev);
        if (s.ok()) s = rec.Optional("phi", t.phi);
        return s;
      });
}

absl::Status PersistResults(const ExperimentOutput& output,
                            const std::string& dir, bool force) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root)) {
    return absl::UnavailableError(
        absl::StrCat("cannot create output directory ", dir));
  }
  const std::string& id = output.experiment_id;
  auto present = FileHasId(root / kResultsFile, id);
  if (!present.ok()) return present.status();
  if (*present && !force) {
    return absl::AlreadyExistsError(absl::StrCat(
        "experiment '", id, "' already has results in ", dir,
        " (use --force to replace them)"));
  }

  std::string rows;
  for (const auto& r : output.rows) absl::StrAppend(&rows, ResultRowLine(r), "\n");
  if (absl::Status s = RewriteKeyed(root / kResultsFile,
                                    absl::StrJoin(ResultColumns(), ","), id, rows);
      !s.ok()) {
    return s;
  }
  std::string trade;
  for (const auto& t : output.tradeoffs) {
    absl::StrAppend(&trade, TradeoffLine(t), "\n");
  }
  if (absl::Status s =
          RewriteKeyed(root / kTradeoffFile,
                       absl::StrJoin(TradeoffColumns(), ","), id, trade);
      !s.ok()) {
    return s;
  }

  // Old ROC rows of this experiment may sit in files of points that are no
  // longer part of it.
  std::map<std::string, std::string> roc_bodies;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("roc_") && name.ends_with(".csv")) {
      roc_bodies[name];
    }
  }
  for (const auto& series : output.rocs) {
    absl::StrAppend(&roc_bodies[RocFileName(series)], RocBody(id, series));
  }
  for (const auto& [name, body] : roc_bodies) {
    if (absl::Status s = RewriteKeyed(root / name, kRocHeader, id, body);
        !s.ok()) {
      return s;
    }
  }

  nlohmann::json configs = nlohmann::json::object();
  const fs::path config_path = root / kConfigFile;
  if (fs::exists(config_path)) {
    auto text = ReadFile(config_path);
    if (!text.ok()) return text.status();
    try {
      configs = nlohmann::json::parse(*text);
    } catch (const nlohmann::json::parse_error& e) {
      return absl::DataLossError(
          absl::StrCat(config_path.string(), ": ", e.what()));
    }
    if (!configs.is_object()) {
      return absl::DataLossError(
          absl::StrCat(config_path.string(), ": expected a JSON object"));
    }
  }
  try {
    configs[id] = nlohmann::json::parse(output.config_json);
  } catch (const nlohmann::json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("configuration snapshot: ", e.what()));
  }
  return WriteFileAtomic(config_path, configs.dump(2) + "\n");
}

}  // namespace dpmi::runner
