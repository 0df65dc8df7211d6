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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpmi/data/csv_io.h"
#include "dpmi/data/splits.h"
#include "dpmi/dp/rdp_accountant.h"
#include "dpmi/runner/config.h"
#include "dpmi/runner/results.h"
#include "dpmi/runner/runner.h"

namespace dpmi::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::size_t> repeats;
  std::optional<std::uint64_t> seed;
  bool force = false;
  std::size_t jobs = 1;

  // account
  std::optional<double> sampling_rate;
  std::optional<std::size_t> records;
  std::optional<std::size_t> lot;
  double noise_multiplier = 0.0;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> epochs;
  std::optional<double> delta;
};

absl::StatusOr<std::string> OutputDir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("DPMI_OUT"); env != nullptr && *env) {
    return std::string(env);
  }
  return absl::InvalidArgumentError(
      "no output directory: pass --out or set DPMI_OUT");
}

absl::StatusOr<runner::ExperimentConfig> LoadWithOverrides(const Options& o) {
  auto config = runner::LoadConfig(o.config);
  if (!config.ok()) return config.status();
  if (o.repeats) config->repeats = *o.repeats;
  if (o.seed) config->seed = *o.seed;
  if (absl::Status s = config->Validate(); !s.ok()) return s;
  return config;
}

absl::Status Gen(const Options& o, std::ostream& out) {
  auto config = LoadWithOverrides(o);
  if (!config.ok()) return config.status();
  auto dir = OutputDir(o);
  if (!dir.ok()) return dir.status();
  std::error_code ec;
  fs::create_directories(*dir, ec);
  if (ec) return absl::UnavailableError(absl::StrCat("cannot create ", *dir));
  auto dataset = runner::BuildDataset(*config);
  if (!dataset.ok()) return dataset.status();
  const std::string name = config->dataset.DisplayName();
  const fs::path root(*dir);
  std::vector<std::string> written;
  if (!dataset->domain.empty()) {
    // Train-like and test-like records go to separate files, in pool order.
    for (std::uint8_t d : {0, 1}) {
      data::IndexSet ids;
      for (std::size_t i = 0; i < dataset->size(); ++i) {
        if (dataset->domain[i] == d) ids.push_back(i);
      }
      data::Dataset part = dataset->Subset(ids);
      part.domain.clear();
      const std::string path =
          (root / absl::StrCat(name, d == 0 ? "_train" : "_test", ".csv")).string();
      if (absl::Status s = data::SaveCsvDataset(part, path); !s.ok()) return s;
      written.push_back(path);
    }
  } else {
    const std::string path = (root / absl::StrCat(name, ".csv")).string();
    if (absl::Status s = data::SaveCsvDataset(*dataset, path); !s.ok()) return s;
    written.push_back(path);
    if (dataset->kind == data::FeatureKind::kImage) {
      written.push_back(data::SidecarPath(path));
    }
  }
  data::PartitionOptions opts;
  opts.stratified = config->stratified;
  const bool black_box = config->attack != runner::AttackSelection::kWhiteBox;
  auto splits = data::MakeSplits(*dataset, config->target_size,
                                 black_box ? config->shadows : 0,
                                 runner::RepeatSeed(*config, 0), opts);
  if (!splits.ok()) return splits.status();
  const std::string split_path = (root / absl::StrCat(name, "_splits.json")).string();
  if (absl::Status s = data::SaveSplits(*splits, split_path); !s.ok()) return s;
  written.push_back(split_path);
  for (const auto& w : written) out << "wrote " << w << "\n";
  return absl::OkStatus();
}

absl::Status Run(const Options& o, bool sweep, std::ostream& out) {
  auto config = LoadWithOverrides(o);
  if (!config.ok()) return config.status();
  if (!sweep && config->sweep_axis != runner::SweepAxis::kNone) {
    return absl::InvalidArgumentError(
        "config has a sweep grid; use the sweep subcommand");
  }
  auto dir = OutputDir(o);
  if (!dir.ok()) return dir.status();
  if (!o.force) {
    // Refuse before spending any time on training.
    auto existing = runner::ReadResults(*dir);
    if (existing.ok()) {
      for (const auto& row : *existing) {
        if (row.experiment_id == config->experiment_id) {
          return absl::AlreadyExistsError(absl::StrCat(
              "experiment '", config->experiment_id, "' already has results in ",
              *dir, " (use --force to replace them)"));
        }
      }
    }
  }
  runner::RunOptions options;
  options.include_reference = sweep;
  options.jobs = o.jobs;
  auto result = runner::RunSweep(*config, options);
  if (!result.ok()) return result.status();
  if (absl::Status s = runner::PersistResults(result->output, *dir, o.force);
      !s.ok()) {
    return s;
  }
  out << runner::FormatSummary(result->output.rows);
  std::size_t errors = 0;
  for (const auto& row : result->output.rows) errors += !row.error.empty();
  if (errors > 0) {
    return absl::InternalError(
        absl::StrCat(errors, " result rows failed; see the error column of ",
                     (fs::path(*dir) / "results.csv").string()));
  }
  return absl::OkStatus();
}

absl::Status Account(const Options& o, std::ostream& out) {
  double q = 0.0;
  if (o.sampling_rate) {
    if (o.records || o.lot) {
      return absl::InvalidArgumentError(
          "give either --sampling-rate or --records with --lot");
    }
    q = *o.sampling_rate;
  } else if (o.records && o.lot) {
    if (*o.records == 0 || *o.lot == 0 || *o.lot > *o.records) {
      return absl::InvalidArgumentError("need 0 < lot <= records");
    }
    q = static_cast<double>(*o.lot) / static_cast<double>(*o.records);
  } else {
    return absl::InvalidArgumentError(
        "give --sampling-rate or both --records and --lot");
  }
  std::size_t steps = 0;
  if (o.steps && o.epochs) {
    return absl::InvalidArgumentError("give either --steps or --epochs");
  } else if (o.steps) {
    steps = *o.steps;
  } else if (o.epochs) {
    if (!o.records || !o.lot) {
      return absl::InvalidArgumentError("--epochs needs --records and --lot");
    }
    steps = dp::StepsForEpochs(*o.records, *o.lot, *o.epochs);
  } else {
    return absl::InvalidArgumentError("give --steps or --epochs");
  }
  double delta = 0.0;
  if (o.delta) {
    delta = *o.delta;
  } else if (o.records) {
    delta = 1.0 / static_cast<double>(*o.records);
  } else {
    return absl::InvalidArgumentError("give --delta (or --records for 1/n)");
  }
  auto acc = dp::RdpAccountant::Create(q, o.noise_multiplier);
  if (!acc.ok()) return acc.status();
  acc->Compose(steps);
  auto g = acc->GetPrivacy(delta);
  if (!g.ok()) return g.status();
  out << absl::StrFormat("sampling_rate %.15g\n", q)
      << absl::StrFormat("noise_multiplier %.15g\n", o.noise_multiplier)
      << "steps " << steps << "\n"
      << absl::StrFormat("delta %.15g\n", delta)
      << "epsilon " << runner::FormatNumber(g->epsilon) << "\n"
      << "order " << runner::FormatNumber(g->order) << "\n";
  if (dp::IsNoPrivacy(g->epsilon)) out << "no privacy (epsilon is infinite)\n";
  return absl::OkStatus();
}

absl::Status Report(const Options& o, std::ostream& out) {
  auto dir = OutputDir(o);
  if (!dir.ok()) return dir.status();
  auto text = runner::ReportSummary(*dir);
  if (!text.ok()) return text.status();
  out << *text;
  return absl::OkStatus();
}

}  // namespace

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

int RunDpmi(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Membership inference under local and central differential privacy",
               "dpmi"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", o.config, "Experiment JSON")->required();
    }
    sub->add_option("--out", o.out, "Output directory (default: $DPMI_OUT)");
  };
  auto add_run = [&](CLI::App* sub) {
    add_common(sub, true);
    sub->add_option("--repeats", o.repeats, "Override the repeat count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Override the base seed");
    sub->add_flag("--force", o.force, "Replace results of the same experiment id");
    sub->add_option("--jobs", o.jobs, "Jobs run in parallel")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* gen = app.add_subcommand("gen", "Write a config's dataset and splits");
  add_common(gen, true);
  gen->add_option("--seed", o.seed, "Override the base seed");
  CLI::App* run = app.add_subcommand("run", "Run one configuration");
  add_run(run);
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run the reference and every grid point");
  add_run(sweep);
  CLI::App* account = app.add_subcommand("account", "Query the RDP accountant");
  account->add_option("--sampling-rate", o.sampling_rate, "Lot size / records");
  account->add_option("--records", o.records, "Training records n");
  account->add_option("--lot", o.lot, "Lot size");
  account->add_option("--noise-multiplier", o.noise_multiplier, "z")->required();
  account->add_option("--steps", o.steps, "Optimizer steps");
  account->add_option("--epochs", o.epochs, "Epochs (needs --records, --lot)");
  account->add_option("--delta", o.delta, "Target delta (default 1/records)");
  CLI::App* report = app.add_subcommand("report", "Summarize results.csv");
  add_common(report, false);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dpmi: " << e.what() << "\n";
    return kExitValidation;
  }

  absl::Status status;
  if (gen->parsed()) {
    status = Gen(o, out);
  } else if (run->parsed()) {
    status = Run(o, false, out);
  } else if (sweep->parsed()) {
    status = Run(o, true, out);
  } else if (account->parsed()) {
    status = Account(o, out);
  } else if (report->parsed()) {
    status = Report(o, out);
  }
  if (!status.ok()) err << "dpmi: " << status.message() << "\n";
  return ExitCode(status);
}

}  // namespace dpmi::cli
