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

#include "dpmi/runner/runner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"
#include "dpmi/common/parallel.h"
#include "dpmi/common/rng.h"
#include "dpmi/data/csv_io.h"
#include "dpmi/data/generators.h"
#include "dpmi/metrics/tradeoff.h"
#include "dpmi/mi/features.h"
#include "dpmi/nn/trainer.h"

namespace dpmi::runner {
namespace {

// Seed streams of a repeat.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr std::uint64_t kAttackStream = 3;
constexpr std::uint64_t kShadowStream = 4;

std::vector<mi::AttackKind> SelectedAttacks(AttackSelection selection) {
  switch (selection) {
    case AttackSelection::kBlackBox:
      return {mi::AttackKind::kBlackBox};
    case AttackSelection::kWhiteBox:
      return {mi::AttackKind::kWhiteBox};
    case AttackSelection::kBoth:
      return {mi::AttackKind::kBlackBox, mi::AttackKind::kWhiteBox};
  }
  return {};
}

std::string OneLine(absl::string_view message) {
  return absl::StrReplaceAll(message, {{"\r", " "}, {"\n", " "}});
}

std::optional<double> Finite(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

// Attack features must come from the stored records, never from the
// locally perturbed copies the target was trained on.
absl::Status CheckRawFeatures(const data::Dataset& dataset,
                              const mi::AttackResult& attack) {
  const auto& block = attack.evaluation_features.block;
  const auto& flags = attack.evaluation_features.flags;
  data::IndexSet in, out;
  for (std::size_t i = 0; i < block.size(); ++i) {
    (flags[i] ? in : out).push_back(block.record_ids[i]);
  }
  const std::uint64_t expected = mi::CombineHashes(
      mi::HashRecords(dataset, in), mi::HashRecords(dataset, out));
  if (expected != block.input_hash) {
    return absl::InternalError(absl::StrCat(
        std::string(mi::AttackKindName(attack.kind)),
        " attack features were not extracted from the unperturbed records"));
  }
  return absl::OkStatus();
}

ResultRow BaseRow(const ExperimentConfig& config, const data::Dataset& dataset,
                  const dp::PrivacySpec& privacy, std::size_t repeat) {
  ResultRow row;
  row.experiment_id = config.experiment_id;
  row.dataset = config.dataset.DisplayName();
  row.num_classes = dataset.num_classes;
  row.mode = std::string(dp::PrivacyModeName(privacy.mode));
  if (privacy.mode == dp::PrivacyMode::kLdp) row.epsilon_i = privacy.epsilon_i;
  if (privacy.mode == dp::PrivacyMode::kCdp) {
    row.noise_multiplier = privacy.cdp.noise_multiplier;
    if (privacy.cdp.clipping_enabled()) row.clip_norm = privacy.cdp.clip_norm;
  }
  row.repeat = repeat;
  row.seed = RepeatSeed(config, repeat);
  return row;
}

absl::Status RunJobStages(const ExperimentConfig& config,
                          const data::Dataset& dataset,
                          const dp::PrivacySpec& privacy, std::size_t repeat,
                          std::size_t shadow_jobs, JobResult& job,
                          ResultRow& base) {
  const std::uint64_t seed = RepeatSeed(config, repeat);
  const auto kinds = SelectedAttacks(config.attack);
  const bool black_box =
      std::find(kinds.begin(), kinds.end(), mi::AttackKind::kBlackBox) !=
      kinds.end();
  data::PartitionOptions opts;
  opts.stratified = config.stratified;
  auto layout = data::PartitionAttackData(
      dataset, config.target_size, black_box ? config.shadows : 0,
      DeriveSeed(seed, kSplitStream), opts);
  if (!layout.ok()) return layout.status();
  job.layout = *std::move(layout);

  const data::Dataset train = dataset.Subset(job.layout.target_train);
  const data::Dataset test = dataset.Subset(job.layout.target_test);
  auto target = mi::TrainUnderPrivacy(train, test, config.model, privacy,
                                      DeriveSeed(seed, kTargetStream));
  if (!target.ok()) return target.status();
  job.target = *std::move(target);
  if (privacy.mode != dp::PrivacyMode::kLdp &&
      job.target->train_input_hash !=
          mi::HashRecords(dataset, job.layout.target_train)) {
    return absl::InternalError(absl::StrCat(
        std::string(dp::PrivacyModeName(privacy.mode)),
        " mode trained on records that differ from the stored ones"));
  }
  if (privacy.mode != dp::PrivacyMode::kNone) {
    base.epsilon = Finite(job.target->epsilon);
  }
  auto train_acc = nn::EvaluateAccuracy(job.target->net, train);
  if (!train_acc.ok()) return train_acc.status();
  auto test_acc = nn::EvaluateAccuracy(job.target->net, test);
  if (!test_acc.ok()) return test_acc.status();
  base.train_accuracy = *train_acc;
  base.test_accuracy = *test_acc;

  mi::AttackClassifierConfig attack_config = config.attack_model;
  attack_config.seed = DeriveSeed(seed, kAttackStream);
  for (mi::AttackKind kind : kinds) {
    absl::StatusOr<mi::AttackResult> attack;
    if (kind == mi::AttackKind::kBlackBox) {
      auto shadows =
          mi::TrainShadows(dataset, job.layout, config.model, privacy,
                           DeriveSeed(seed, kShadowStream), shadow_jobs);
      if (!shadows.ok()) return shadows.status();
      attack = mi::RunBlackBoxAttack(dataset, job.layout, *job.target,
                                     *shadows, attack_config);
    } else {
      attack = mi::RunWhiteBoxAttack(dataset, job.layout, *job.target,
                                     config.known_fraction, attack_config);
    }
    if (!attack.ok()) return attack.status();
    if (absl::Status s = CheckRawFeatures(dataset, *attack); !s.ok()) return s;
    job.attacks.push_back(*std::move(attack));
  }
  return absl::OkStatus();
}

std::optional<double> Mean(const std::vector<double>& v) {
  return Summarize(v).mean;
}

}  // namespace

absl::StatusOr<data::Dataset> BuildDataset(const ExperimentConfig& config) {
  const DatasetConfig& d = config.dataset;
  const std::uint64_t seed = d.seed.value_or(config.seed);
  switch (d.source) {
    case DatasetSource::kCarts: {
      data::CartSpec spec = d.carts;
      spec.seed = seed;
      return data::GenUnbalancedCarts(spec);
    }
    case DatasetSource::kSkewed: {
      data::SkewSpec spec = d.skewed;
      spec.seed = seed;
      return data::GenSkewedPurchasesPooled(spec);
    }
    case DatasetSource::kImages: {
      data::ImageSpec spec = d.images;
      spec.seed = seed;
      return data::GenGrayImages(spec);
    }
    case DatasetSource::kCsv:
      return data::LoadCsvDataset(d.csv_path, d.label_column, d.csv_kind);
  }
  return absl::InvalidArgumentError("unknown dataset source");
}

std::uint64_t RepeatSeed(const ExperimentConfig& config, std::size_t repeat) {
  return config.seed + repeat;
}

std::string PointToken(const dp::PrivacySpec& privacy) {
  switch (privacy.mode) {
    case dp::PrivacyMode::kNone:
      return "none";
    case dp::PrivacyMode::kLdp:
      return absl::StrCat("epsi", FormatNumber(privacy.epsilon_i));
    case dp::PrivacyMode::kCdp:
      return absl::StrCat("z", FormatNumber(privacy.cdp.noise_multiplier));
  }
  return "unknown";
}

std::vector<PrivacyPoint> SweepPoints(const ExperimentConfig& config,
                                      bool include_reference) {
  std::vector<PrivacyPoint> points;
  if (include_reference) {
    PrivacyPoint ref;
    ref.privacy.mode = dp::PrivacyMode::kNone;
    ref.token = PointToken(ref.privacy);
    ref.reference = true;
    points.push_back(ref);
  }
  if (config.sweep_axis == SweepAxis::kNone) {
    if (config.privacy.mode != dp::PrivacyMode::kNone || !include_reference) {
      points.push_back({config.privacy, PointToken(config.privacy),
                        config.privacy.mode == dp::PrivacyMode::kNone});
    }
    return points;
  }
  for (double v : config.sweep_values) {
    PrivacyPoint p;
    p.privacy = config.privacy;
    if (config.sweep_axis == SweepAxis::kEpsilonI) {
      p.privacy.epsilon_i = v;
    } else {
      p.privacy.cdp.noise_multiplier = v;
    }
    p.token = PointToken(p.privacy);
    points.push_back(p);
  }
  return points;
}

JobResult RunJob(const ExperimentConfig& config, const data::Dataset& dataset,
                 const dp::PrivacySpec& privacy, std::size_t repeat,
                 std::size_t shadow_jobs) {
  const auto start = std::chrono::steady_clock::now();
  JobResult job;
  ResultRow base = BaseRow(config, dataset, privacy, repeat);
  const absl::Status status = RunJobStages(config, dataset, privacy, repeat,
                                           shadow_jobs, job, base);
  base.wall_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  job.ok = status.ok();
  for (mi::AttackKind kind : SelectedAttacks(config.attack)) {
    ResultRow row = base;
    row.attack = std::string(mi::AttackKindName(kind));
    if (status.ok()) {
      for (const auto& a : job.attacks) {
        if (a.kind == kind) row.auc = a.auc;
      }
    } else {
      row.error = OneLine(status.ToString());
      row.train_accuracy.reset();
      row.test_accuracy.reset();
      row.epsilon.reset();
    }
    job.rows.push_back(std::move(row));
  }
  return job;
}

MeanStd Summarize(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  out.mean = mean;
  out.stddev = values.size() > 1
                   ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                   : 0.0;
  return out;
}

absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const RunOptions& options) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  auto dataset = BuildDataset(config);
  if (!dataset.ok()) return dataset.status();

  SweepResult result;
  result.points = SweepPoints(config, options.include_reference);
  const std::size_t repeats = config.repeats;
  const std::size_t tasks = result.points.size() * repeats;
  result.jobs.resize(tasks);
  // Parallelism is across jobs; shadows of one job train in sequence.
  absl::Status s = ParallelFor(tasks, options.jobs, [&](std::size_t t) {
    const std::size_t p = t / repeats;
    const std::size_t r = t % repeats;
    result.jobs[t] =
        RunJob(config, *dataset, result.points[p].privacy, r);
    return absl::OkStatus();
  });
  if (!s.ok()) return s;

  ExperimentOutput& out = result.output;
  out.experiment_id = config.experiment_id;
  out.config_json = DumpConfig(config);
  const auto kinds = SelectedAttacks(config.attack);
  const auto grid = metrics::UniformGrid();

  // Repeat means per point and attack, reference first.
  struct Means {
    std::optional<double> auc, test_acc;
  };
  std::map<std::string, Means> reference;
  for (std::size_t p = 0; p < result.points.size(); ++p) {
    const PrivacyPoint& point = result.points[p];
    for (mi::AttackKind kind : kinds) {
      const std::string attack(mi::AttackKindName(kind));
      TradeoffRecord rec;
      rec.experiment_id = config.experiment_id;
      rec.mode = std::string(dp::PrivacyModeName(point.privacy.mode));
      rec.attack = attack;
      std::vector<double> auc, train_acc, test_acc, eps;
      RocSeries series;
      series.attack = attack;
      series.token = point.token;
      std::vector<metrics::RocCurve> curves;
      for (std::size_t r = 0; r < repeats; ++r) {
        const JobResult& job = result.jobs[p * repeats + r];
        for (const ResultRow& row : job.rows) {
          if (row.attack != attack) continue;
          rec.epsilon_i = row.epsilon_i;
          rec.noise_multiplier = row.noise_multiplier;
          if (!row.error.empty()) continue;
          auc.push_back(*row.auc);
          train_acc.push_back(*row.train_accuracy);
          test_acc.push_back(*row.test_accuracy);
          if (row.epsilon) eps.push_back(*row.epsilon);
        }
        for (const auto& a : job.attacks) {
          if (a.kind != kind || !job.ok) continue;
          curves.push_back(a.roc);
          series.repeat_ids.push_back(r);
          series.repeats.push_back(metrics::Resample(a.roc, grid));
        }
      }
      rec.repeats = auc.size();
      const MeanStd a = Summarize(auc), tr = Summarize(train_acc),
                    te = Summarize(test_acc);
      rec.auc_mean = a.mean;
      rec.auc_stddev = a.stddev;
      rec.train_accuracy_mean = tr.mean;
      rec.train_accuracy_stddev = tr.stddev;
      rec.test_accuracy_mean = te.mean;
      rec.test_accuracy_stddev = te.stddev;
      rec.epsilon = Mean(eps);
      if (point.reference) {
        reference[attack] = {a.mean, te.mean};
      } else if (auto it = reference.find(attack); it != reference.end() &&
                 it->second.auc && it->second.test_acc && a.mean && te.mean) {
        auto phi = metrics::Phi(*it->second.auc, *a.mean, *it->second.test_acc,
                                *te.mean, dataset->num_classes);
        if (!phi.ok()) return phi.status();
        rec.phi = *phi;
      }
      out.tradeoffs.push_back(rec);
      if (!curves.empty()) {
        auto mean = metrics::MeanRoc(curves, grid);
        if (!mean.ok()) return mean.status();
        series.mean = *std::move(mean);
        out.rocs.push_back(std::move(series));
      }
    }
  }
  // Rows carry their point's phi.
  for (std::size_t p = 0; p < result.points.size(); ++p) {
    for (std::size_t r = 0; r < repeats; ++r) {
      for (ResultRow row : result.jobs[p * repeats + r].rows) {
        for (const auto& rec : out.tradeoffs) {
          if (rec.attack == row.attack &&
              rec.mode == row.mode && rec.epsilon_i == row.epsilon_i &&
              rec.noise_multiplier == row.noise_multiplier) {
            row.phi = rec.phi;
          }
        }
        out.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

namespace {

std::string Cell(const MeanStd& m) {
  if (!m.mean) return "n/a";
  return absl::StrFormat("%.4f ± %.4f", *m.mean, *m.stddev);
}

}  // namespace

std::string FormatSummary(const std::vector<ResultRow>& rows) {
  if (rows.empty()) return "no data\n";
  using Key = std::tuple<std::string, std::string, std::string, std::string,
                         std::string>;
  struct Group {
    std::vector<double> train_acc, test_acc, auc, phi;
    std::size_t errors = 0;
  };
  std::vector<Key> order;
  std::map<Key, Group> groups;
  // Reference AUC values per (experiment, attack).
  std::map<std::pair<std::string, std::string>, std::vector<double>> ref_auc;
  for (const ResultRow& r : rows) {
    Key key{r.experiment_id, r.mode, FormatOptional(r.epsilon_i),
            FormatOptional(r.noise_multiplier), r.attack};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Group& g = it->second;
    if (!r.error.empty()) {
      ++g.errors;
      continue;
    }
    if (r.train_accuracy) g.train_acc.push_back(*r.train_accuracy);
    if (r.test_accuracy) g.test_acc.push_back(*r.test_accuracy);
    if (r.auc) g.auc.push_back(*r.auc);
    if (r.phi) g.phi.push_back(*r.phi);
    if (r.mode == "none" && r.auc) {
      ref_auc[{r.experiment_id, r.attack}].push_back(*r.auc);
    }
  }
  std::string out =
      "mean ± stddev over repeats (stddev: sample standard deviation)\n";
  absl::StrAppendFormat(&out, "%-20s %-5s %-9s %-9s %-6s %3s  %-17s %-17s %-17s %-17s %s\n",
                        "experiment", "mode", "eps_i", "z", "attack", "n",
                        "train_acc", "test_acc", "auc", "phi", "note");
  for (const Key& key : order) {
    const Group& g = groups.at(key);
    const auto& [id, mode, eps_i, z, attack] = key;
    std::string note;
    const auto ref = ref_auc.find({id, attack});
    if (ref != ref_auc.end() && *Summarize(ref->second).mean <= 0.5) {
      note = "attack ineffective";
    }
    if (g.errors > 0) {
      note = absl::StrCat(note, note.empty() ? "" : "; ", g.errors,
                          g.errors == 1 ? " error" : " errors");
    }
    absl::StrAppendFormat(
        &out, "%-20s %-5s %-9s %-9s %-6s %3d  %-17s %-17s %-17s %-17s %s\n", id,
        mode, eps_i, z, attack, g.auc.size(), Cell(Summarize(g.train_acc)),
        Cell(Summarize(g.test_acc)), Cell(Summarize(g.auc)),
        Cell(Summarize(g.phi)), note);
  }
  return out;
}

absl::StatusOr<std::string> ReportSummary(const std::string& results_dir) {
  auto rows = ReadResults(results_dir);
  if (!rows.ok()) return rows.status();
  return FormatSummary(*rows);
}

}  // namespace dpmi::runner
