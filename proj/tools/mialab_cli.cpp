// Copyright 2026 The mialab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line entry point.
//
// Exit codes: 0 success, 1 configuration or input error, 2 numeric failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mialab/config.hpp"
#include "mialab/experiment.hpp"
#include "mialab/report.hpp"
#include "mialab/snapshot_io.hpp"

namespace fs = std::filesystem;
using namespace mialab;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config, "JSON run configuration")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Run seed");
    cmd->add_option("--out-dir", out_dir, "Output directory");
  }

  ExperimentSpec spec() const {
    ExperimentSpec s = config.empty() ? ExperimentSpec{} : load_config(config);
    if (seed) s.seeds = {*seed};
    return s;
  }

  std::uint64_t run_seed(const ExperimentSpec& s) const {
    return seed ? *seed : (s.seeds.empty() ? 0 : s.seeds.front());
  }
};

DatasetSplit dataset_for(const ExperimentSpec& spec, std::uint64_t seed) {
  const DatasetSpec& d = spec.dataset;
  return make_synthetic_dataset(d.num_classes, d.dim, d.per_class, d.separation, seed,
                                d.finetune_per_class);
}

void print_metrics(const ConditionResult& r) {
  std::printf("%s seed=%llu accuracy=%.4f precision=%.4f recall=%.4f auc=%.4f\n",
              r.condition.c_str(), static_cast<unsigned long long>(r.seed),
              r.metrics.accuracy, r.metrics.precision, r.metrics.recall, r.auc);
}

int cmd_gen_data(const Common& c) {
  const ExperimentSpec spec = c.spec();
  const DatasetSplit data = dataset_for(spec, c.run_seed(spec));
  const fs::path out(c.out_dir);
  write_labeled_set_csv(data.members, out / "members.csv");
  write_labeled_set_csv(data.nonmembers, out / "nonmembers.csv");
  if (!data.finetune.empty()) write_labeled_set_csv(data.finetune, out / "finetune.csv");
  std::printf("wrote %lld members, %lld nonmembers to %s\n",
              static_cast<long long>(data.members.size()),
              static_cast<long long>(data.nonmembers.size()), out.c_str());
  return 0;
}

int cmd_train_target(const Common& c, const std::string& data_dir) {
  const ExperimentSpec spec = c.spec();
  const std::uint64_t seed = c.run_seed(spec);
  DatasetSplit data;
  if (data_dir.empty()) {
    data = dataset_for(spec, seed);
  } else {
    data.members = read_labeled_set_csv(fs::path(data_dir) / "members.csv");
    data.num_classes = spec.dataset.num_classes;
  }
  TrainingConfig cfg = spec.training;
  cfg.seed = seed;
  const TrainingResult result = train_centralized(spec.architecture(), data, cfg);
  const fs::path out(c.out_dir);
  save_snapshot(result.final_model, out / "target.json");
  for (const ModelSnapshot& s : result.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_epoch_%04lld.json",
                  static_cast<long long>(s.tag()));
    save_snapshot(s, out / name);
  }
  std::printf("train accuracy %.4f; model written to %s\n", result.train_accuracy,
              (out / "target.json").c_str());
  return 0;
}

AttackerPlacement placement_named(const std::string& name, const ExperimentSpec& spec,
                                  const LabeledSet& targets) {
  const FederatedSpec& f = *spec.federated;
  const double gamma = f.gamma > 0.0 ? f.gamma : f.lr;
  if (name == "none") return AttackerPlacement::none();
  if (name == "global_passive") return AttackerPlacement::global_passive();
  if (name == "global_active") {
    return AttackerPlacement::global_active(gamma, targets, false, f.victim);
  }
  if (name == "global_active_isolate") {
    return AttackerPlacement::global_active(gamma, targets, true, f.victim);
  }
  if (name == "local_passive") return AttackerPlacement::local_passive(f.observer);
  throw ConfigError("unknown placement '" + name + "'");
}

int cmd_fl_run(const Common& c, const std::string& placement_name) {
  ExperimentSpec spec = c.spec();
  if (!spec.federated) spec.federated = FederatedSpec{};
  const std::uint64_t seed = c.run_seed(spec);
  const FederatedSpec& f = *spec.federated;
  const DatasetSpec& d = spec.dataset;
  const DatasetSplit pool = make_synthetic_dataset(
      d.num_classes, d.dim, d.per_class * f.num_participants, d.separation, seed);
  const Index block = static_cast<Index>(d.per_class) * d.num_classes;
  std::vector<DatasetSplit> parts;
  for (int p = 0; p < f.num_participants; ++p) {
    std::vector<Index> rows;
    for (Index i = 0; i < block; ++i) rows.push_back(block * p + i);
    DatasetSplit part;
    part.num_classes = d.num_classes;
    part.members = pool.members.subset(rows);
    parts.push_back(std::move(part));
  }
  std::vector<Index> first;
  for (Index i = 0; i < block; ++i) first.push_back(i);
  const LabeledSet targets = LabeledSet::concat(
      parts[static_cast<std::size_t>(f.victim)].members, pool.nonmembers.subset(first));

  FLConfig cfg;
  cfg.num_participants = f.num_participants;
  cfg.rounds = f.rounds;
  cfg.local_epochs = f.local_epochs;
  cfg.batch_size = f.batch_size;
  cfg.lr = f.lr;
  cfg.seed = seed;
  cfg.parallel = f.parallel;
  cfg.observation_rounds = stage_round_sets(f.rounds).back();
  const RoundLog log = fl_run(spec.architecture(), parts, cfg,
                              placement_named(placement_name, spec, targets));
  const fs::path out(c.out_dir);
  save_round_log(log, out / "rounds");
  for (std::size_t p = 0; p < parts.size(); ++p) {
    write_labeled_set_csv(parts[p].members,
                          out / ("participant_" + std::to_string(p) + ".csv"));
  }
  write_labeled_set_csv(pool.nonmembers.subset(first), out / "victim_nonmembers.csv");
  std::printf("%d rounds logged to %s; final global accuracy on victim data %.4f\n",
              log.size(), (out / "rounds").c_str(),
              accuracy(log.rounds().back().global,
                       parts[static_cast<std::size_t>(f.victim)].members));
  return 0;
}

int cmd_attack(const Common& c, const std::vector<std::string>& snapshot_paths,
               const std::string& members_path, const std::string& nonmembers_path,
               bool unsupervised) {
  const ExperimentSpec spec = c.spec();
  const std::uint64_t seed = c.run_seed(spec);
  std::vector<ModelSnapshot> snapshots;
  for (const std::string& p : snapshot_paths) snapshots.push_back(load_snapshot(p));
  const LabeledSet members = read_labeled_set_csv(members_path);
  const LabeledSet nonmembers = read_labeled_set_csv(nonmembers_path);
  const Architecture& arch = snapshots.front().arch();
  const fs::path out(c.out_dir);

  ConditionResult result;
  if (unsupervised) {
    const FeatureConfig fc =
        spec.features ? *spec.features : FeatureConfig::unsupervised_default(arch);
    result = evaluate_unsupervised("unsupervised", seed, snapshots, members, nonmembers, fc);
  } else {
    const FeatureConfig fc =
        spec.features ? *spec.features : FeatureConfig::supervised_default(arch);
    const AttackSplit split =
        split_for_attack(members, nonmembers, spec.attack.train_fraction, seed);
    std::vector<WhiteBoxFeatures> rows = extract_batch(snapshots, split.eval_members, fc);
    std::vector<WhiteBoxFeatures> more = extract_batch(snapshots, split.eval_nonmembers, fc);
    rows.insert(rows.end(), more.begin(), more.end());
    FeatureGeometry geometry;
    const Eigen::MatrixXd matrix = feature_matrix(rows, fc, &geometry);
    std::vector<int> truth(static_cast<std::size_t>(split.eval_members.size()), 1);
    truth.resize(rows.size(), 0);
    write_feature_matrix(matrix, truth, geometry, out / "eval_features.csv");
    result = evaluate_supervised("supervised", seed, snapshots, split, fc, spec);
  }
  nlohmann::json doc = {{"condition", result.condition},
                        {"seed", result.seed},
                        {"accuracy", result.metrics.accuracy},
                        {"precision", result.metrics.precision},
                        {"recall", result.metrics.recall},
                        {"auc", result.auc}};
  write_text_file(out / "attack_metrics.json", doc.dump(2) + "\n");
  print_metrics(result);
  return 0;
}

int cmd_experiment(const Common& c, const std::vector<std::uint64_t>& seeds) {
  ExperimentSpec spec = c.spec();
  if (!seeds.empty()) spec.seeds = seeds;
  const ReportPaths paths = ReportPaths::in_dir(c.out_dir);
  const ExperimentReport report = run_experiment(spec, [&](const ExperimentReport& partial) {
    emit_report(partial, ReportPaths{paths.csv.string() + ".partial",
                                     paths.json.string() + ".partial"});
  });
  emit_report(report, paths);
  for (const ConditionSummary& s : report.summaries) {
    std::printf("%-24s accuracy median %.4f [%.4f, %.4f]  auc median %.4f\n",
                s.condition.c_str(), s.accuracy.median, s.accuracy.min, s.accuracy.max,
                s.auc.median);
  }
  std::printf("report written to %s (%.1fs)\n", paths.csv.c_str(),
              report.wall_clock_seconds);
  return 0;
}

int cmd_report(const Common& c, const std::string& report_path) {
  const ExperimentReport report = load_report(report_path);
  const fs::path out(c.out_dir);
  write_text_file(out / "report.csv", report_csv(report));
  std::cout << report_csv(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"White-box membership inference laboratory"};
  app.require_subcommand(1);

  Common common;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic member/non-member dataset");
  common.add_to(gen);

  std::string data_dir;
  auto* train = app.add_subcommand("train-target", "Train a target model");
  common.add_to(train);
  train->add_option("--data-dir", data_dir, "Directory holding members.csv");

  std::string placement = "global_passive";
  auto* fl = app.add_subcommand("fl-run", "Simulate federated training and log rounds");
  common.add_to(fl);
  fl->add_option("--placement", placement,
                 "none, global_passive, global_active, global_active_isolate, local_passive");

  std::vector<std::string> snapshots;
  std::string members, nonmembers;
  bool unsupervised = false;
  auto* attack = app.add_subcommand("attack", "Attack saved snapshots");
  common.add_to(attack);
  attack->add_option("--snapshot", snapshots, "Model snapshot JSON (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  attack->add_option("--members", members, "Member samples CSV")
      ->required()
      ->check(CLI::ExistingFile);
  attack->add_option("--nonmembers", nonmembers, "Non-member samples CSV")
      ->required()
      ->check(CLI::ExistingFile);
  attack->add_flag("--unsupervised", unsupervised, "Spectral clustering attack");

  std::vector<std::uint64_t> seeds;
  auto* exp = app.add_subcommand("experiment", "Run a scenario over seeds");
  common.add_to(exp);
  exp->add_option("--seeds", seeds, "Seed list (overrides config and --seed)");

  std::string report_path;
  auto* rep = app.add_subcommand("report", "Re-emit the CSV of a saved report");
  common.add_to(rep);
  rep->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen_data(common);
    if (*train) return cmd_train_target(common, data_dir);
    if (*fl) return cmd_fl_run(common, placement);
    if (*attack) return cmd_attack(common, snapshots, members, nonmembers, unsupervised);
    if (*exp) return cmd_experiment(common, seeds);
    if (*rep) return cmd_report(common, report_path);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
