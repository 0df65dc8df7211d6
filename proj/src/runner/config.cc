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

#include "dpmi/runner/config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace dpmi::runner {
namespace {

using Json = nlohmann::json;

// Typed access to one JSON object. The first problem is kept; Finish()
// also reports keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) Fail(path_, "expected an object");
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return object_.is_object() && object_.contains(key);
  }

  void Double(const std::string& key, double& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_number()) return Fail(Path(key), "expected a number");
    out = v.get<double>();
  }

  void Unsigned(const std::string& key, std::uint64_t& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_number_unsigned()) {
      return Fail(Path(key), "expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void Size(const std::string& key, std::size_t& out) {
    std::uint64_t v = out;
    Unsigned(key, v);
    out = static_cast<std::size_t>(v);
  }

  void Int(const std::string& key, int& out) {
    std::uint64_t v = static_cast<std::uint64_t>(std::max(out, 0));
    Unsigned(key, v);
    if (v > 1'000'000) return Fail(Path(key), "value too large");
    out = static_cast<int>(v);
  }

  void Bool(const std::string& key, bool& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_boolean()) return Fail(Path(key), "expected true or false");
    out = v.get<bool>();
  }

  void String(const std::string& key, std::string& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_string()) return Fail(Path(key), "expected a string");
    out = v.get<std::string>();
  }

  void SizeList(const std::string& key, std::vector<std::size_t>& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_array()) return Fail(Path(key), "expected an array");
    out.clear();
    for (const Json& e : v) {
      if (!e.is_number_unsigned()) {
        return Fail(Path(key), "expected non-negative integers");
      }
      out.push_back(e.get<std::size_t>());
    }
  }

  void DoubleList(const std::string& key, std::vector<double>& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_array()) return Fail(Path(key), "expected an array");
    out.clear();
    for (const Json& e : v) {
      if (!e.is_number()) return Fail(Path(key), "expected numbers");
      out.push_back(e.get<double>());
    }
  }

  void StringList(const std::string& key, std::vector<std::string>& out) {
    if (!Has(key)) return;
    const Json& v = object_.at(key);
    if (!v.is_array()) return Fail(Path(key), "expected an array");
    out.clear();
    for (const Json& e : v) {
      if (!e.is_string()) return Fail(Path(key), "expected strings");
      out.push_back(e.get<std::string>());
    }
  }

  const Json* Object(const std::string& key) {
    if (!Has(key)) return nullptr;
    return &object_.at(key);
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : absl::StrCat(path_, ".", key);
  }

  void Fail(const std::string& where, absl::string_view what) {
    if (status_.ok()) {
      status_ = absl::InvalidArgumentError(
          absl::StrCat("config ", where, ": ", what));
    }
  }

  void Merge(const absl::Status& s) {
    if (status_.ok() && !s.ok()) status_ = s;
  }

  absl::Status Finish() {
    if (!status_.ok() || !object_.is_object()) return status_;
    for (const auto& item : object_.items()) {
      if (!seen_.contains(item.key())) {
        Fail(Path(item.key()), "unknown key");
        break;
      }
    }
    return status_;
  }

 private:
  const Json& object_;
  std::string path_;
  std::set<std::string> seen_;
  absl::Status status_;
};

void ReadDataset(const Json& j, const std::string& base_dir,
                 DatasetConfig& out, ObjectReader& parent) {
  ObjectReader r(j, "dataset");
  const bool has_generator = r.Has("generator");
  const bool has_csv = r.Has("csv");
  if (has_generator == has_csv) {
    r.Fail("dataset", "needs exactly one of \"generator\" or \"csv\"");
    parent.Merge(r.Finish());
    return;
  }
  r.String("name", out.name);
  if (r.Has("seed")) {
    std::uint64_t seed = 0;
    r.Unsigned("seed", seed);
    out.seed = seed;
  }
  if (has_csv) {
    out.source = DatasetSource::kCsv;
    r.String("csv", out.csv_path);
    if (!out.csv_path.empty() && !base_dir.empty() &&
        std::filesystem::path(out.csv_path).is_relative()) {
      out.csv_path = (std::filesystem::path(base_dir) / out.csv_path).string();
    }
    r.String("label_column", out.label_column);
    std::string kind(data::FeatureKindName(out.csv_kind));
    r.String("kind", kind);
    auto parsed = data::ParseFeatureKind(kind);
    if (!parsed.ok()) {
      r.Fail("dataset.kind", parsed.status().message());
    } else {
      out.csv_kind = *parsed;
    }
    parent.Merge(r.Finish());
    return;
  }
  std::string generator;
  r.String("generator", generator);
  if (generator == "carts") {
    out.source = DatasetSource::kCarts;
    r.Int("classes", out.carts.num_classes);
    r.Size("records", out.carts.records);
    r.Size("width", out.carts.width);
    r.Double("imbalance", out.carts.imbalance);
    r.Double("pattern_strength", out.carts.pattern_strength);
    r.Double("background", out.carts.background);
    r.Size("pattern_bits", out.carts.pattern_bits);
  } else if (generator == "skewed") {
    out.source = DatasetSource::kSkewed;
    r.Int("classes", out.skewed.num_classes);
    r.Size("records", out.skewed.records);
    r.Size("width", out.skewed.width);
    r.Double("p_indicator", out.skewed.p_indicator);
    r.Double("p_noise_train", out.skewed.p_noise_train);
    r.Double("p_noise_test", out.skewed.p_noise_test);
  } else if (generator == "images") {
    out.source = DatasetSource::kImages;
    r.Size("count", out.images.count);
    r.Size("side", out.images.side);
    r.Double("noise_stddev", out.images.noise_stddev);
    std::vector<std::string> names;
    r.StringList("patterns", names);
    if (r.Has("patterns")) {
      out.images.patterns.clear();
      for (const std::string& n : names) {
        auto p = data::ParseImagePattern(n);
        if (!p.ok()) {
          r.Fail("dataset.patterns", p.status().message());
          break;
        }
        out.images.patterns.push_back(*p);
      }
    }
  } else {
    r.Fail("dataset.generator",
           absl::StrCat("unknown generator '", generator,
                        "' (expected carts, skewed or images)"));
  }
  parent.Merge(r.Finish());
}

void ReadModel(const Json& j, mi::ModelConfig& out, ObjectReader& parent) {
  ObjectReader r(j, "model");
  r.SizeList("hidden", out.hidden);
  std::string optimizer(nn::OptimizerKindName(out.train.optimizer.kind));
  r.String("optimizer", optimizer);
  auto kind = nn::ParseOptimizerKind(optimizer);
  if (!kind.ok()) {
    r.Fail("model.optimizer", kind.status().message());
  } else {
    out.train.optimizer.kind = *kind;
  }
  r.Double("learning_rate", out.train.optimizer.learning_rate);
  r.Double("beta1", out.train.optimizer.beta1);
  r.Double("beta2", out.train.optimizer.beta2);
  r.Double("adam_epsilon", out.train.optimizer.epsilon);
  r.Size("batch_size", out.train.batch_size);
  r.Size("epochs", out.train.max_epochs);
  r.Bool("early_stopping", out.train.early_stopping);
  r.Size("patience", out.train.patience);
  r.Double("tolerance", out.train.tolerance);
  parent.Merge(r.Finish());
}

void ReadPrivacy(const Json& j, dp::PrivacySpec& out, ObjectReader& parent) {
  ObjectReader r(j, "privacy");
  std::string mode(dp::PrivacyModeName(out.mode));
  r.String("mode", mode);
  auto parsed = dp::ParsePrivacyMode(mode);
  if (!parsed.ok()) {
    r.Fail("privacy.mode", parsed.status().message());
  } else {
    out.mode = *parsed;
  }
  r.Double("epsilon_i", out.epsilon_i);
  r.Double("pixel_neighborhood", out.pixel_neighborhood);
  r.Size("pixel_cell", out.pixel_cell);
  r.Double("noise_multiplier", out.cdp.noise_multiplier);
  if (r.Has("clip_norm") && j.at("clip_norm").is_string()) {
    if (j.at("clip_norm").get<std::string>() == "none") {
      out.cdp.clip_norm = dp::kNoClipping;
    } else {
      r.Fail("privacy.clip_norm", "expected a number or \"none\"");
    }
  } else {
    r.Double("clip_norm", out.cdp.clip_norm);
  }
  r.Double("delta", out.cdp.delta);
  parent.Merge(r.Finish());
}

void ReadAttack(const Json& j, ExperimentConfig& out, ObjectReader& parent) {
  ObjectReader r(j, "attack");
  std::string kind(AttackSelectionName(out.attack));
  r.String("kind", kind);
  if (kind == "bb") {
    out.attack = AttackSelection::kBlackBox;
  } else if (kind == "wb") {
    out.attack = AttackSelection::kWhiteBox;
  } else if (kind == "both") {
    out.attack = AttackSelection::kBoth;
  } else {
    r.Fail("attack.kind",
           absl::StrCat("unknown attack '", kind, "' (expected bb, wb or both)"));
  }
  r.Size("shadows", out.shadows);
  r.Double("known_fraction", out.known_fraction);
  r.Size("hidden", out.attack_model.hidden);
  r.Double("learning_rate", out.attack_model.learning_rate);
  r.Size("batch_size", out.attack_model.batch_size);
  r.Size("max_epochs", out.attack_model.max_epochs);
  r.Size("patience", out.attack_model.patience);
  r.Double("holdout", out.attack_model.holdout);
  r.Bool("log_scale", out.attack_model.log_scale);
  parent.Merge(r.Finish());
}

void ReadSweep(const Json& j, ExperimentConfig& out, ObjectReader& parent) {
  ObjectReader r(j, "sweep");
  const bool eps = r.Has("epsilon_i");
  const bool z = r.Has("noise_multiplier");
  if (eps && z) {
    r.Fail("sweep", "grid over both epsilon_i and noise_multiplier; "
                    "sweep exactly one axis");
  } else if (eps) {
    out.sweep_axis = SweepAxis::kEpsilonI;
    r.DoubleList("epsilon_i", out.sweep_values);
  } else if (z) {
    out.sweep_axis = SweepAxis::kNoiseMultiplier;
    r.DoubleList("noise_multiplier", out.sweep_values);
  }
  parent.Merge(r.Finish());
}

absl::StatusOr<ExperimentConfig> ParseWithBase(std::string_view text,
                                               const std::string& base_dir) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config is not valid JSON: ", e.what()));
  }
  ExperimentConfig config = DefaultConfig();
  ObjectReader r(root, "");
  r.String("experiment_id", config.experiment_id);
  if (const Json* d = r.Object("dataset")) {
    ReadDataset(*d, base_dir, config.dataset, r);
  } else {
    r.Fail("dataset", "missing");
  }
  r.Size("target_size", config.target_size);
  r.Bool("stratified", config.stratified);
  if (const Json* m = r.Object("model")) ReadModel(*m, config.model, r);
  if (const Json* p = r.Object("privacy")) ReadPrivacy(*p, config.privacy, r);
  if (const Json* a = r.Object("attack")) ReadAttack(*a, config, r);
  r.Size("repeats", config.repeats);
  r.Unsigned("seed", config.seed);
  if (const Json* s = r.Object("sweep")) ReadSweep(*s, config, r);
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return config;
}

bool ValidId(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

absl::Status Invalid(std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("config ", std::string(what)));
}

}  // namespace

std::string_view DatasetSourceName(DatasetSource source) {
  switch (source) {
    case DatasetSource::kCarts:
      return "carts";
    case DatasetSource::kSkewed:
      return "skewed";
    case DatasetSource::kImages:
      return "images";
    case DatasetSource::kCsv:
      return "csv";
  }
  return "unknown";
}

std::string DatasetConfig::DisplayName() const {
  if (!name.empty()) return name;
  if (source == DatasetSource::kCsv) {
    return std::filesystem::path(csv_path).stem().string();
  }
  return std::string(DatasetSourceName(source));
}

std::string_view AttackSelectionName(AttackSelection selection) {
  switch (selection) {
    case AttackSelection::kBlackBox:
      return "bb";
    case AttackSelection::kWhiteBox:
      return "wb";
    case AttackSelection::kBoth:
      return "both";
  }
  return "unknown";
}

std::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone:
      return "none";
    case SweepAxis::kEpsilonI:
      return "epsilon_i";
    case SweepAxis::kNoiseMultiplier:
      return "noise_multiplier";
  }
  return "unknown";
}

ExperimentConfig DefaultConfig() {
  ExperimentConfig c;
  c.experiment_id = "experiment";
  return c;
}

absl::Status ExperimentConfig::Validate() const {
  if (!ValidId(experiment_id)) {
    return Invalid(absl::StrCat(
        "experiment_id '", experiment_id,
        "' must be non-empty and use only letters, digits, '-', '_' or '.'"));
  }
  if (repeats < 1) return Invalid("repeats must be at least 1");
  if (target_size < 2) return Invalid("target_size must be at least 2");
  if (attack != AttackSelection::kWhiteBox && shadows < 1) {
    return Invalid("attack.shadows must be at least 1 for the black-box attack");
  }
  if (!(known_fraction > 0.0 && known_fraction < 1.0)) {
    return Invalid("attack.known_fraction must lie in (0,1)");
  }
  for (std::size_t h : model.hidden) {
    if (h == 0) return Invalid("model.hidden sizes must be positive");
  }
  const auto& t = model.train;
  if (!(t.optimizer.learning_rate > 0.0) || !std::isfinite(t.optimizer.learning_rate)) {
    return Invalid("model.learning_rate must be positive");
  }
  if (t.batch_size == 0 || t.max_epochs == 0) {
    return Invalid("model.batch_size and model.epochs must be positive");
  }
  if (absl::Status s = attack_model.Validate(); !s.ok()) {
    return Invalid(absl::StrCat("attack: ", s.message()));
  }
  if (absl::Status s = privacy.Validate(); !s.ok()) {
    return Invalid(absl::StrCat("privacy: ", s.message()));
  }
  switch (sweep_axis) {
    case SweepAxis::kNone:
      break;
    case SweepAxis::kEpsilonI:
      if (privacy.mode != dp::PrivacyMode::kLdp) {
        return Invalid("sweep over epsilon_i needs privacy.mode \"ldp\"");
      }
      break;
    case SweepAxis::kNoiseMultiplier:
      if (privacy.mode != dp::PrivacyMode::kCdp) {
        return Invalid("sweep over noise_multiplier needs privacy.mode \"cdp\"");
      }
      break;
  }
  if (sweep_axis != SweepAxis::kNone) {
    if (sweep_values.empty()) return Invalid("sweep grid is empty");
    std::set<double> seen;
    for (double v : sweep_values) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        return Invalid(absl::StrCat("sweep values must be finite and positive, got ", v));
      }
      if (!seen.insert(v).second) {
        return Invalid(absl::StrCat("sweep value ", v, " repeated"));
      }
      dp::PrivacySpec point = privacy;
      if (sweep_axis == SweepAxis::kEpsilonI) {
        point.epsilon_i = v;
      } else {
        point.cdp.noise_multiplier = v;
      }
      if (absl::Status s = point.Validate(); !s.ok()) {
        return Invalid(absl::StrCat("sweep point ", v, ": ", s.message()));
      }
    }
  }
  absl::Status ds;
  switch (dataset.source) {
    case DatasetSource::kCarts:
      ds = dataset.carts.Validate();
      break;
    case DatasetSource::kSkewed:
      ds = dataset.skewed.Validate();
      break;
    case DatasetSource::kImages:
      ds = dataset.images.Validate();
      break;
    case DatasetSource::kCsv:
      if (dataset.csv_path.empty()) return Invalid("dataset.csv is empty");
      if (!std::filesystem::is_regular_file(dataset.csv_path)) {
        return Invalid(absl::StrCat("dataset.csv: no such file ",
                                    dataset.csv_path));
      }
      if (privacy.mode == dp::PrivacyMode::kLdp &&
          dataset.csv_kind == data::FeatureKind::kReal) {
        return Invalid("ldp needs binary or image features, dataset is real");
      }
      break;
  }
  if (!ds.ok()) return Invalid(absl::StrCat("dataset: ", ds.message()));
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view json_text) {
  return ParseWithBase(json_text, "");
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string base =
      std::filesystem::path(path).parent_path().string();
  return ParseWithBase(buf.str(), base);
}

std::string DumpConfig(const ExperimentConfig& c) {
  Json j;
  j["experiment_id"] = c.experiment_id;
  Json d;
  const DatasetConfig& ds = c.dataset;
  if (!ds.name.empty()) d["name"] = ds.name;
  if (ds.seed) d["seed"] = *ds.seed;
  switch (ds.source) {
    case DatasetSource::kCarts:
      d["generator"] = "carts";
      d["classes"] = ds.carts.num_classes;
      d["records"] = ds.carts.records;
      d["width"] = ds.carts.width;
      d["imbalance"] = ds.carts.imbalance;
      d["pattern_strength"] = ds.carts.pattern_strength;
      d["background"] = ds.carts.background;
      d["pattern_bits"] = ds.carts.pattern_bits;
      break;
    case DatasetSource::kSkewed:
      d["generator"] = "skewed";
      d["classes"] = ds.skewed.num_classes;
      d["records"] = ds.skewed.records;
      d["width"] = ds.skewed.width;
      d["p_indicator"] = ds.skewed.p_indicator;
      d["p_noise_train"] = ds.skewed.p_noise_train;
      d["p_noise_test"] = ds.skewed.p_noise_test;
      break;
    case DatasetSource::kImages: {
      d["generator"] = "images";
      d["count"] = ds.images.count;
      d["side"] = ds.images.side;
      d["noise_stddev"] = ds.images.noise_stddev;
      Json names = Json::array();
      for (auto p : ds.images.patterns) {
        names.push_back(std::string(data::ImagePatternName(p)));
      }
      d["patterns"] = names;
      break;
    }
    case DatasetSource::kCsv:
      d["csv"] = ds.csv_path;
      d["label_column"] = ds.label_column;
      d["kind"] = std::string(data::FeatureKindName(ds.csv_kind));
      break;
  }
  j["dataset"] = d;
  j["target_size"] = c.target_size;
  j["stratified"] = c.stratified;
  const auto& t = c.model.train;
  j["model"] = {
      {"hidden", c.model.hidden},
      {"optimizer", std::string(nn::OptimizerKindName(t.optimizer.kind))},
      {"learning_rate", t.optimizer.learning_rate},
      {"beta1", t.optimizer.beta1},
      {"beta2", t.optimizer.beta2},
      {"adam_epsilon", t.optimizer.epsilon},
      {"batch_size", t.batch_size},
      {"epochs", t.max_epochs},
      {"early_stopping", t.early_stopping},
      {"patience", t.patience},
      {"tolerance", t.tolerance},
  };
  Json p = {
      {"mode", std::string(dp::PrivacyModeName(c.privacy.mode))},
      {"epsilon_i", c.privacy.epsilon_i},
      {"pixel_neighborhood", c.privacy.pixel_neighborhood},
      {"pixel_cell", c.privacy.pixel_cell},
      {"noise_multiplier", c.privacy.cdp.noise_multiplier},
      {"delta", c.privacy.cdp.delta},
  };
  if (c.privacy.cdp.clipping_enabled()) {
    p["clip_norm"] = c.privacy.cdp.clip_norm;
  } else {
    p["clip_norm"] = "none";
  }
  j["privacy"] = p;
  const auto& a = c.attack_model;
  j["attack"] = {
      {"kind", std::string(AttackSelectionName(c.attack))},
      {"shadows", c.shadows},
      {"known_fraction", c.known_fraction},
      {"hidden", a.hidden},
      {"learning_rate", a.learning_rate},
      {"batch_size", a.batch_size},
      {"max_epochs", a.max_epochs},
      {"patience", a.patience},
      {"holdout", a.holdout},
      {"log_scale", a.log_scale},
  };
  j["repeats"] = c.repeats;
  j["seed"] = c.seed;
  if (c.sweep_axis != SweepAxis::kNone) {
    j["sweep"] = {{std::string(SweepAxisName(c.sweep_axis)), c.sweep_values}};
  }
  return j.dump(2) + "\n";
}

}  // namespace dpmi::runner
