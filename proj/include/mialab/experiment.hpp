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

// Scenario runner: trains targets, runs federated simulations, mounts the
// attacks and collects per-seed metrics for each experimental condition.

#ifndef MIALAB_EXPERIMENT_HPP_
#define MIALAB_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mialab/attack.hpp"
#include "mialab/features.hpp"
#include "mialab/fedsim.hpp"
#include "mialab/metrics.hpp"
#include "mialab/training.hpp"

namespace mialab {

enum class Scenario {
  kLayerDepth,
  kOutputsVsGradients,
  kFineTune,
  kFLStages,
  kFLPlacement,
  kUnsupervisedCentralized,
};

std::string to_string(Scenario scenario);
Scenario parse_scenario(const std::string& name);

struct DatasetSpec {
  int num_classes = 4;
  int dim = 8;
  // Per class, in each of the member and non-member halves. In federated
  // scenarios this is per participant.
  int per_class = 50;
  double separation = 1.0;
  // Fine-tune set size per class (fine_tune scenario).
  int finetune_per_class = 50;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct FederatedSpec {
  int num_participants = 4;
  int rounds = 60;
  int local_epochs = 1;
  int batch_size = 32;
  double lr = 0.05;
  // Ascent rate for active attacks; 0 means "same as lr".
  double gamma = 0.0;
  int victim = 0;
  int observer = 1;
  bool parallel = false;

  friend bool operator==(const FederatedSpec&, const FederatedSpec&) = default;
};

struct ExperimentSpec {
  Scenario scenario = Scenario::kLayerDepth;
  DatasetSpec dataset;
  std::vector<Index> hidden{64, 64};
  // The seed field is replaced by each run seed.
  TrainingConfig training;
  int finetune_epochs = 100;
  std::optional<FederatedSpec> federated;
  // Overrides the scenario's default feature configuration where the
  // scenario does not vary features itself (fine_tune, fl_*).
  std::optional<FeatureConfig> features;
  AttackTrainConfig attack;
  std::vector<Index> attack_submodule_hidden{64, 64};
  std::vector<Index> attack_encoder_hidden{64, 64};
  std::vector<std::uint64_t> seeds;
  // Run seeds on separate threads; results are ordered by seed either way.
  bool parallel_seeds = false;

  void validate() const;
  Architecture architecture() const;
  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct ConditionResult {
  std::string condition;
  std::uint64_t seed = 0;
  ClassificationMetrics metrics;
  double auc = 0.0;
  std::vector<RocPoint> roc;
};

bool operator==(const ConditionResult& a, const ConditionResult& b);

struct SummaryStat {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const SummaryStat&, const SummaryStat&) = default;
};

struct ConditionSummary {
  std::string condition;
  SummaryStat accuracy;
  SummaryStat precision;
  SummaryStat recall;
  SummaryStat auc;
  friend bool operator==(const ConditionSummary&, const ConditionSummary&) = default;
};

struct ExperimentReport {
  ExperimentSpec spec;
  // Ordered by seed value, then by the scenario's condition order.
  std::vector<ConditionResult> results;
  std::vector<ConditionSummary> summaries;
  double wall_clock_seconds = 0.0;

  const ConditionSummary& summary(const std::string& condition) const;
  std::vector<double> accuracies(const std::string& condition) const;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// Condition names in report order.
std::vector<std::string> scenario_conditions(const ExperimentSpec& spec);

// Observation-round sets for the four federated stages, scaled from the
// 300-round reference schedule onto `rounds`.
std::vector<std::vector<int>> stage_round_sets(int rounds);

double median(std::vector<double> values);
std::vector<ConditionSummary> summarize(const std::vector<ConditionResult>& results,
                                        const std::vector<std::string>& conditions);

// Called with the completed results before a failure propagates.
using PartialReportSink = std::function<void(const ExperimentReport&)>;

ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const PartialReportSink& on_failure = {});

// Building blocks shared with the CLI.

// Balanced attacker split: `train_fraction` of the pool (sized by the
// smaller population) for training, the rest for evaluation.
struct AttackSplit {
  LabeledSet train_members, train_nonmembers, eval_members, eval_nonmembers;
};
AttackSplit split_for_attack(const LabeledSet& members, const LabeledSet& nonmembers,
                             double train_fraction, std::uint64_t seed);

// Supervised white-box attack against the given snapshot sequence.
ConditionResult evaluate_supervised(const std::string& condition, std::uint64_t seed,
                                    std::span<const ModelSnapshot> snapshots,
                                    const AttackSplit& split,
                                    const FeatureConfig& features,
                                    const ExperimentSpec& spec);

// Unsupervised attack over members and non-members together.
ConditionResult evaluate_unsupervised(const std::string& condition, std::uint64_t seed,
                                      std::span<const ModelSnapshot> snapshots,
                                      const LabeledSet& members,
                                      const LabeledSet& nonmembers,
                                      const FeatureConfig& features);

}  // namespace mialab

#endif  // MIALAB_EXPERIMENT_HPP_
