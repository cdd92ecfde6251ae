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

#include "mialab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <future>
#include <map>
#include <numeric>

namespace mialab {

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kLayerDepth:
      return "layer_depth";
    case Scenario::kOutputsVsGradients:
      return "outputs_vs_gradients";
    case Scenario::kFineTune:
      return "fine_tune";
    case Scenario::kFLStages:
      return "fl_stages";
    case Scenario::kFLPlacement:
      return "fl_placement";
    case Scenario::kUnsupervisedCentralized:
      return "unsupervised_centralized";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::kLayerDepth, Scenario::kOutputsVsGradients,
                     Scenario::kFineTune, Scenario::kFLStages, Scenario::kFLPlacement,
                     Scenario::kUnsupervisedCentralized}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

bool operator==(const ConditionResult& a, const ConditionResult& b) {
  return a.condition == b.condition && a.seed == b.seed &&
         a.metrics.accuracy == b.metrics.accuracy &&
         a.metrics.precision == b.metrics.precision &&
         a.metrics.recall == b.metrics.recall &&
         a.metrics.precision_undefined == b.metrics.precision_undefined &&
         a.metrics.recall_undefined == b.metrics.recall_undefined && a.auc == b.auc &&
         a.roc == b.roc;
}

namespace {

bool is_federated(Scenario s) {
  return s == Scenario::kFLStages || s == Scenario::kFLPlacement;
}

}  // namespace

void ExperimentSpec::validate() const {
  const DatasetSpec& d = dataset;
  if (d.num_classes < 2 || d.dim < 1 || d.per_class < 1 || d.finetune_per_class < 0) {
    throw ConfigError("dataset sizes must be positive (at least 2 classes)");
  }
  if (d.num_classes > d.dim) throw ConfigError("dataset needs num_classes <= dim");
  if (!(d.separation >= 0.0)) throw ConfigError("separation must be non-negative");
  if (hidden.empty()) throw ConfigError("model needs at least one hidden layer");
  for (Index h : hidden) {
    if (h <= 0) throw ConfigError("hidden sizes must be positive");
  }
  training.validate();
  attack.validate();
  if (finetune_epochs < 0) throw ConfigError("finetune_epochs must be non-negative");
  if (scenario == Scenario::kFineTune && d.finetune_per_class < 1) {
    throw ConfigError("fine_tune scenario needs finetune_per_class > 0");
  }
  if (scenario == Scenario::kLayerDepth && hidden.size() < 2) {
    throw ConfigError("layer_depth needs at least two hidden layers");
  }
  if (is_federated(scenario)) {
    if (!federated) throw ConfigError(to_string(scenario) + " needs a federated section");
    const FederatedSpec& f = *federated;
    FLConfig probe;
    probe.num_participants = f.num_participants;
    probe.rounds = f.rounds;
    probe.local_epochs = f.local_epochs;
    probe.batch_size = f.batch_size;
    probe.lr = f.lr;
    probe.validate();
    if (!(f.gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    if (f.victim < 0 || f.victim >= f.num_participants || f.observer < 0 ||
        f.observer >= f.num_participants || f.observer == f.victim) {
      throw ConfigError("victim and observer must be distinct participants");
    }
  }
  if (features) features->validate(architecture());
  AttackNetSpec probe{{1}, attack_submodule_hidden, attack_encoder_hidden};
  probe.validate();
}

Architecture ExperimentSpec::architecture() const {
  return make_mlp(dataset.dim, hidden, dataset.num_classes, true);
}

const ConditionSummary& ExperimentReport::summary(const std::string& condition) const {
  for (const auto& s : summaries) {
    if (s.condition == condition) return s;
  }
  throw InputError("no condition '" + condition + "' in report");
}

std::vector<double> ExperimentReport::accuracies(const std::string& condition) const {
  std::vector<double> out;
  for (const auto& r : results) {
    if (r.condition == condition) out.push_back(r.metrics.accuracy);
  }
  return out;
}

std::vector<std::string> scenario_conditions(const ExperimentSpec& spec) {
  switch (spec.scenario) {
    case Scenario::kLayerDepth:
      return {"third_last_layer", "penultimate_layer", "final_layer"};
    case Scenario::kOutputsVsGradients:
      return {"outputs", "gradients"};
    case Scenario::kFineTune:
      return {"D_vs_nonmembers", "D_vs_d"};
    case Scenario::kFLStages:
      return {"stage_early", "stage_mid", "stage_late", "stage_latest"};
    case Scenario::kFLPlacement:
      return {"global_passive", "global_active", "global_active_isolate", "local_passive"};
    case Scenario::kUnsupervisedCentralized:
      return {"spectral"};
  }
  return {};
}

std::vector<std::vector<int>> stage_round_sets(int rounds) {
  static const std::vector<std::vector<int>> kReference = {
      {5, 10, 15, 20, 25},
      {10, 20, 30, 40, 50},
      {50, 100, 150, 200},
      {100, 150, 200, 250, 300},
  };
  std::vector<std::vector<int>> out;
  for (const auto& set : kReference) {
    std::vector<int> scaled;
    for (int r : set) {
      const long s = std::lround(static_cast<double>(r) * rounds / 300.0);
      scaled.push_back(static_cast<int>(std::clamp<long>(s, 1, rounds)));
    }
    std::sort(scaled.begin(), scaled.end());
    scaled.erase(std::unique(scaled.begin(), scaled.end()), scaled.end());
    out.push_back(std::move(scaled));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<ConditionSummary> summarize(const std::vector<ConditionResult>& results,
                                        const std::vector<std::string>& conditions) {
  std::vector<ConditionSummary> out;
  for (const std::string& condition : conditions) {
    std::vector<double> acc, prec, rec, auc;
    for (const auto& r : results) {
      if (r.condition != condition) continue;
      acc.push_back(r.metrics.accuracy);
      prec.push_back(r.metrics.precision);
      rec.push_back(r.metrics.recall);
      auc.push_back(r.auc);
    }
    if (acc.empty()) continue;
    auto stat = [](const std::vector<double>& v) {
      return SummaryStat{median(v), *std::min_element(v.begin(), v.end()),
                         *std::max_element(v.begin(), v.end())};
    };
    out.push_back({condition, stat(acc), stat(prec), stat(rec), stat(auc)});
  }
  return out;
}

AttackSplit split_for_attack(const LabeledSet& members, const LabeledSet& nonmembers,
                             double train_fraction, std::uint64_t seed) {
  const Index pool = std::min(members.size(), nonmembers.size());
  if (pool < 2) throw InputError("attack split needs at least two samples per side");
  Index n_train = static_cast<Index>(std::lround(train_fraction * static_cast<double>(pool)));
  n_train = std::clamp<Index>(n_train, 1, pool - 1);

  Rng rng = make_rng(seed, Stream::kAttackSplit);
  auto permuted = [&](Index n) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
  };
  const std::vector<Index> m = permuted(members.size());
  const std::vector<Index> n = permuted(nonmembers.size());
  auto range = [](const std::vector<Index>& v, Index lo, Index hi) {
    return std::vector<Index>(v.begin() + lo, v.begin() + hi);
  };
  AttackSplit split;
  split.train_members = members.subset(range(m, 0, n_train));
  split.eval_members = members.subset(range(m, n_train, pool));
  split.train_nonmembers = nonmembers.subset(range(n, 0, n_train));
  split.eval_nonmembers = nonmembers.subset(range(n, n_train, pool));
  return split;
}

namespace {

Eigen::MatrixXd stacked_features(std::span<const ModelSnapshot> snapshots,
                                 const LabeledSet& a, const LabeledSet& b,
                                 const FeatureConfig& cfg, FeatureGeometry* geometry) {
  std::vector<WhiteBoxFeatures> features = extract_batch(snapshots, a, cfg);
  std::vector<WhiteBoxFeatures> more = extract_batch(snapshots, b, cfg);
  features.insert(features.end(), std::make_move_iterator(more.begin()),
                  std::make_move_iterator(more.end()));
  return feature_matrix(features, cfg, geometry);
}

std::vector<int> membership_labels(Index members, Index nonmembers) {
  std::vector<int> labels(static_cast<std::size_t>(members), 1);
  labels.resize(static_cast<std::size_t>(members + nonmembers), 0);
  return labels;
}

ConditionResult make_result(const std::string& condition, std::uint64_t seed,
                            std::span<const double> scores,
                            std::span<const int> predicted,
                            std::span<const int> truth) {
  ConditionResult r;
  r.condition = condition;
  r.seed = seed;
  r.metrics = classification_metrics(predicted, truth);
  RocCurve roc = roc_auc(scores, truth);
  r.auc = roc.auc;
  r.roc = std::move(roc.points);
  return r;
}

}  // namespace

ConditionResult evaluate_supervised(const std::string& condition, std::uint64_t seed,
                                    std::span<const ModelSnapshot> snapshots,
                                    const AttackSplit& split,
                                    const FeatureConfig& features,
                                    const ExperimentSpec& spec) {
  FeatureGeometry geometry;
  const Eigen::MatrixXd train_x = stacked_features(
      snapshots, split.train_members, split.train_nonmembers, features, &geometry);
  const std::vector<int> train_y =
      membership_labels(split.train_members.size(), split.train_nonmembers.size());

  AttackTrainConfig cfg = spec.attack;
  cfg.seed = seed;
  const AttackModel model = train_supervised_attack(
      train_x, train_y, geometry,
      AttackNetSpec::for_geometry(geometry, spec.attack_submodule_hidden,
                                  spec.attack_encoder_hidden),
      cfg);

  FeatureGeometry eval_geometry;
  const Eigen::MatrixXd eval_x = stacked_features(
      snapshots, split.eval_members, split.eval_nonmembers, features, &eval_geometry);
  if (eval_geometry.segment_sizes() != geometry.segment_sizes()) {
    throw InputError("evaluation features differ in geometry from training features");
  }
  const std::vector<int> truth =
      membership_labels(split.eval_members.size(), split.eval_nonmembers.size());
  const std::vector<double> scores = membership_scores(model, eval_x);
  std::vector<int> predicted;
  for (double s : scores) predicted.push_back(s >= 0.5 ? 1 : 0);
  return make_result(condition, seed, scores, predicted, truth);
}

ConditionResult evaluate_unsupervised(const std::string& condition, std::uint64_t seed,
                                      std::span<const ModelSnapshot> snapshots,
                                      const LabeledSet& members,
                                      const LabeledSet& nonmembers,
                                      const FeatureConfig& features) {
  std::vector<WhiteBoxFeatures> all = extract_batch(snapshots, members, features);
  std::vector<WhiteBoxFeatures> more = extract_batch(snapshots, nonmembers, features);
  all.insert(all.end(), std::make_move_iterator(more.begin()),
             std::make_move_iterator(more.end()));
  const UnsupervisedResult result = attack_unsupervised(all, seed);
  const std::vector<int> truth = membership_labels(members.size(), nonmembers.size());
  // The clustering yields hard labels, so they double as scores.
  const std::vector<double> scores(result.membership.begin(), result.membership.end());
  return make_result(condition, seed, scores, result.membership, truth);
}

namespace {

FeatureConfig scenario_features(const ExperimentSpec& spec, const Architecture& arch) {
  return spec.features ? *spec.features : FeatureConfig::supervised_default(arch);
}

std::vector<ConditionResult> run_centralized(const ExperimentSpec& spec, std::uint64_t seed) {
  const Architecture arch = spec.architecture();
  const DatasetSpec& d = spec.dataset;
  const DatasetSplit data = make_synthetic_dataset(
      d.num_classes, d.dim, d.per_class, d.separation, seed,
      spec.scenario == Scenario::kFineTune ? d.finetune_per_class : 0);
  TrainingConfig cfg = spec.training;
  cfg.seed = seed;
  const TrainingResult target = train_centralized(arch, data, cfg);
  const std::vector<std::string> names = scenario_conditions(spec);
  const std::vector<ModelSnapshot> final_only = {target.final_model};
  std::vector<ConditionResult> out;

  switch (spec.scenario) {
    case Scenario::kLayerDepth: {
      const AttackSplit split = split_for_attack(data.members, data.nonmembers,
                                                 spec.attack.train_fraction, seed);
      const std::vector<int> acts = activation_layers(arch);
      for (std::size_t i = 0; i < 3; ++i) {
        FeatureConfig fc;
        fc.observed_layers = {acts[acts.size() - 3 + i]};
        fc.include_loss = false;
        out.push_back(evaluate_supervised(names[i], seed, final_only, split, fc, spec));
      }
      break;
    }
    case Scenario::kOutputsVsGradients: {
      const AttackSplit split = split_for_attack(data.members, data.nonmembers,
                                                 spec.attack.train_fraction, seed);
      FeatureConfig outputs;
      outputs.observed_layers = {static_cast<int>(arch.size()) - 1};
      outputs.include_loss = false;
      FeatureConfig gradients;
      gradients.gradient_layers = {dense_layers(arch).back()};
      gradients.include_loss = false;
      out.push_back(evaluate_supervised(names[0], seed, final_only, split, outputs, spec));
      out.push_back(evaluate_supervised(names[1], seed, final_only, split, gradients, spec));
      break;
    }
    case Scenario::kFineTune: {
      TrainingConfig ft = spec.training;
      ft.seed = seed;
      ft.epochs = spec.finetune_epochs;
      ft.snapshot_epochs.clear();
      const ModelSnapshot tuned = fine_tune(target.final_model, data.finetune, ft);
      const std::vector<ModelSnapshot> pair = {target.final_model, tuned};
      const FeatureConfig fc = scenario_features(spec, arch);
      out.push_back(evaluate_supervised(
          names[0], seed, pair,
          split_for_attack(data.members, data.nonmembers, spec.attack.train_fraction, seed),
          fc, spec));
      out.push_back(evaluate_supervised(
          names[1], seed, pair,
          split_for_attack(data.members, data.finetune, spec.attack.train_fraction, seed),
          fc, spec));
      break;
    }
    case Scenario::kUnsupervisedCentralized: {
      const FeatureConfig fc =
          spec.features ? *spec.features : FeatureConfig::unsupervised_default(arch);
      out.push_back(evaluate_unsupervised(names[0], seed, final_only, data.members,
                                          data.nonmembers, fc));
      break;
    }
    default:
      throw InputError("not a centralised scenario");
  }
  return out;
}

struct FederatedSetup {
  std::vector<DatasetSplit> participants;
  LabeledSet victim_nonmembers;
  FLConfig config;
};

FederatedSetup federated_setup(const ExperimentSpec& spec, std::uint64_t seed) {
  const FederatedSpec& f = *spec.federated;
  const DatasetSpec& d = spec.dataset;
  const DatasetSplit pool = make_synthetic_dataset(
      d.num_classes, d.dim, d.per_class * f.num_participants, d.separation, seed);
  // Rows are interleaved by class, so each contiguous block is balanced.
  const Index block = static_cast<Index>(d.per_class) * d.num_classes;
  FederatedSetup setup;
  for (int p = 0; p < f.num_participants; ++p) {
    std::vector<Index> rows(static_cast<std::size_t>(block));
    std::iota(rows.begin(), rows.end(), block * p);
    DatasetSplit part;
    part.num_classes = d.num_classes;
    part.members = pool.members.subset(rows);
    setup.participants.push_back(std::move(part));
  }
  std::vector<Index> rows(static_cast<std::size_t>(block));
  std::iota(rows.begin(), rows.end(), Index{0});
  setup.victim_nonmembers = pool.nonmembers.subset(rows);

  FLConfig& c = setup.config;
  c.num_participants = f.num_participants;
  c.rounds = f.rounds;
  c.local_epochs = f.local_epochs;
  c.batch_size = f.batch_size;
  c.lr = f.lr;
  c.seed = seed;
  c.parallel = f.parallel;
  return setup;
}

std::vector<ConditionResult> run_federated(const ExperimentSpec& spec, std::uint64_t seed) {
  const Architecture arch = spec.architecture();
  const FederatedSpec& f = *spec.federated;
  FederatedSetup setup = federated_setup(spec, seed);
  const LabeledSet& victim_members = setup.participants[static_cast<std::size_t>(f.victim)].members;
  const AttackSplit split = split_for_attack(victim_members, setup.victim_nonmembers,
                                             spec.attack.train_fraction, seed);
  const FeatureConfig fc = scenario_features(spec, arch);
  const std::vector<std::string> names = scenario_conditions(spec);
  const std::vector<std::vector<int>> stages = stage_round_sets(f.rounds);
  std::vector<ConditionResult> out;

  auto attack_view = [&](const std::string& name, const RoundLog& log,
                         const AttackerPlacement& placement, const std::vector<int>& rounds) {
    const SnapshotSeries series =
        participant_view(observe(log, placement, rounds), placement, f.victim);
    return evaluate_supervised(name, seed, series, split, fc, spec);
  };

  if (spec.scenario == Scenario::kFLStages) {
    std::vector<int> all_rounds;
    for (const auto& s : stages) all_rounds.insert(all_rounds.end(), s.begin(), s.end());
    std::sort(all_rounds.begin(), all_rounds.end());
    all_rounds.erase(std::unique(all_rounds.begin(), all_rounds.end()), all_rounds.end());
    setup.config.observation_rounds = all_rounds;
    const AttackerPlacement passive = AttackerPlacement::global_passive();
    const RoundLog log = fl_run(arch, setup.participants, setup.config, passive);
    for (std::size_t i = 0; i < stages.size(); ++i) {
      out.push_back(attack_view(names[i], log, passive, stages[i]));
    }
    return out;
  }

  const std::vector<int>& window = stages.back();
  setup.config.observation_rounds = window;
  const LabeledSet targets = LabeledSet::concat(victim_members, setup.victim_nonmembers);
  const double gamma = f.gamma > 0.0 ? f.gamma : f.lr;

  const AttackerPlacement passive = AttackerPlacement::global_passive();
  // Passive placements never perturb training, so the local observer
  // watches the same run.
  const RoundLog passive_log = fl_run(arch, setup.participants, setup.config, passive);
  out.push_back(attack_view(names[0], passive_log, passive, window));
  for (bool isolate : {false, true}) {
    const AttackerPlacement active =
        AttackerPlacement::global_active(gamma, targets, isolate, f.victim);
    const RoundLog log = fl_run(arch, setup.participants, setup.config, active);
    out.push_back(attack_view(names[isolate ? 2 : 1], log, active, window));
  }
  out.push_back(attack_view(names[3], passive_log,
                            AttackerPlacement::local_passive(f.observer), window));
  return out;
}

std::vector<ConditionResult> run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  return is_federated(spec.scenario) ? run_federated(spec, seed) : run_centralized(spec, seed);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const PartialReportSink& on_failure) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::stable_sort(seeds.begin(), seeds.end());

  ExperimentReport report;
  report.spec = spec;
  const std::vector<std::string> conditions = scenario_conditions(spec);
  auto finish = [&] {
    report.summaries = summarize(report.results, conditions);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto append = [&](std::vector<ConditionResult> rows) {
    report.results.insert(report.results.end(), std::make_move_iterator(rows.begin()),
                          std::make_move_iterator(rows.end()));
  };

  std::exception_ptr failure;
  if (spec.parallel_seeds) {
    std::vector<std::future<std::vector<ConditionResult>>> jobs;
    for (std::uint64_t seed : seeds) {
      jobs.push_back(std::async(std::launch::async, [&spec, seed] { return run_seed(spec, seed); }));
    }
    for (auto& job : jobs) {
      try {
        if (!failure) {
          append(job.get());
        } else {
          job.wait();
        }
      } catch (...) {
        failure = std::current_exception();
      }
    }
  } else {
    for (std::uint64_t seed : seeds) {
      try {
        append(run_seed(spec, seed));
      } catch (...) {
        failure = std::current_exception();
        break;
      }
    }
  }
  finish();
  if (failure) {
    if (on_failure) on_failure(report);
    std::rethrow_exception(failure);
  }
  return report;
}

}  // namespace mialab
