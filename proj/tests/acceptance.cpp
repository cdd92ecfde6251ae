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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances are fixed below and must not be loosened.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mialab/experiment.hpp"
#include "mialab/report.hpp"
#include "oracles.hpp"

namespace {

using namespace mialab;

constexpr double kGradRelTol = 1e-4;
constexpr double kFdStep = 1e-5;
constexpr double kFedAvgTol = 1e-15;
constexpr double kAucTol = 1e-12;
constexpr double kLeakAccuracy = 0.70;
constexpr double kLeakAuc = 0.75;
constexpr double kChanceLo = 0.4;
constexpr double kChanceHi = 0.6;
constexpr double kTrainAccuracy = 0.99;
constexpr double kLayerSlack = 0.03;
constexpr double kGradientSlack = 0.02;
constexpr double kStageGain = 0.05;
constexpr double kStageSlack = 0.03;
constexpr double kActiveSlack = 0.01;
constexpr double kGlobalOverLocal = 0.03;
constexpr double kUnsupervisedAccuracy = 0.60;
constexpr double kFineTuneAccuracy = 0.55;

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Toy target: Gaussian blobs (4 classes, dim 8, 200 members, 200
// non-members), Dense/ReLU net with three Dense layers.
ExperimentSpec toy_spec(Scenario scenario) {
  ExperimentSpec s;
  s.scenario = scenario;
  s.dataset.num_classes = 4;
  s.dataset.dim = 8;
  s.dataset.per_class = 50;
  s.dataset.separation = 1.0;
  s.dataset.finetune_per_class = 50;
  s.hidden = {64, 64};
  s.training.epochs = 300;
  s.training.batch_size = 32;
  s.training.lr = 0.05;
  s.finetune_epochs = 100;
  s.attack.epochs = 60;
  s.attack.batch_size = 32;
  s.attack.lr = 0.05;
  s.attack.train_fraction = 0.5;
  if (scenario == Scenario::kFLStages || scenario == Scenario::kFLPlacement) {
    FederatedSpec f;
    f.num_participants = 4;
    f.rounds = 60;
    f.local_epochs = 10;
    f.batch_size = 32;
    f.lr = 0.05;
    s.federated = f;
  }
  s.seeds = kSeeds;
  return s;
}

double median_of(const ExperimentReport& r, const std::string& condition) {
  return r.summary(condition).accuracy.median;
}

Outcome gradient_correctness() {
  Rng rng = make_rng({101});
  std::uniform_int_distribution<int> width(2, 6);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  int checked = 0;
  for (int net = 0; net < 10; ++net) {
    const Index in = width(rng);
    const Index out = width(rng);
    std::vector<Index> hidden(static_cast<std::size_t>(1 + net % 2));
    for (Index& h : hidden) h = width(rng);
    const ModelSnapshot model = oracle::random_model(make_mlp(in, hidden, out, true), rng);
    std::vector<double> x(static_cast<std::size_t>(in));
    for (double& v : x) v = normal(rng);
    const int label = std::uniform_int_distribution<int>(0, static_cast<int>(out) - 1)(rng);
    const Params g = backward_per_sample(
        model, Eigen::Map<const Eigen::VectorXd>(x.data(), in).eval(), label);
    std::vector<std::pair<std::size_t, Index>> coords;
    for (std::size_t t = 0; t < g.size(); ++t) {
      for (Index c = 0; c < g[t].size(); ++c) coords.emplace_back(t, c);
    }
    std::shuffle(coords.begin(), coords.end(), rng);
    for (int k = 0; k < 10; ++k) {
      const auto [t, c] = coords[static_cast<std::size_t>(k) % coords.size()];
      const double fd = oracle::finite_difference(model, x, label, t, c, kFdStep);
      const double an = g[t].data()(c);
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, std::abs(fd - an) / denom);
      ++checked;
    }
  }
  return {worst <= kGradRelTol && checked == 100,
          std::to_string(checked) + " coordinates on 10 nets, max rel err " +
              fmt("%.2e", worst) + " (tol 1e-4)"};
}

std::vector<DatasetSplit> fl_participants(const ExperimentSpec& s, std::uint64_t seed) {
  const int n = s.federated->num_participants;
  const DatasetSplit pool = make_synthetic_dataset(
      s.dataset.num_classes, s.dataset.dim, s.dataset.per_class * n, s.dataset.separation, seed);
  const Index block = static_cast<Index>(s.dataset.per_class) * s.dataset.num_classes;
  std::vector<DatasetSplit> parts;
  for (int p = 0; p < n; ++p) {
    std::vector<Index> rows;
    for (Index i = 0; i < block; ++i) rows.push_back(block * p + i);
    DatasetSplit d;
    d.num_classes = s.dataset.num_classes;
    d.members = pool.members.subset(rows);
    parts.push_back(std::move(d));
  }
  return parts;
}

FLConfig fl_config(const ExperimentSpec& s, std::uint64_t seed, int rounds) {
  FLConfig cfg;
  cfg.num_participants = s.federated->num_participants;
  cfg.rounds = rounds;
  cfg.local_epochs = s.federated->local_epochs;
  cfg.batch_size = s.federated->batch_size;
  cfg.lr = s.federated->lr;
  cfg.seed = seed;
  return cfg;
}

Outcome fedavg_exactness() {
  const ExperimentSpec s = toy_spec(Scenario::kFLPlacement);
  const auto parts = fl_participants(s, 7);
  const RoundLog log =
      fl_run(s.architecture(), parts, fl_config(s, 7, 20), AttackerPlacement::none());
  double worst = 0.0;
  for (const RoundRecord& r : log.rounds()) {
    std::vector<Params> uploads;
    for (const ModelSnapshot& u : r.uploads) uploads.push_back(u.params());
    const Params expected = oracle::mean(uploads);
    for (std::size_t t = 0; t < expected.size(); ++t) {
      worst = std::max(
          worst, (r.global.params()[t].data() - expected[t].data()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= kFedAvgTol && log.size() == 20,
          std::to_string(log.size()) + " rounds, max |global - mean| " + fmt("%.1e", worst) +
              " (tol 1e-15)"};
}

Outcome auc_oracle() {
  Rng rng = make_rng({303});
  std::uniform_int_distribution<int> size(2, 100);
  std::uniform_int_distribution<int> coarse(0, 7);
  std::bernoulli_distribution coin(0.4);
  double worst = 0.0;
  for (int set = 0; set < 20; ++set) {
    const int n = size(rng);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      scores.push_back(set % 2 ? coarse(rng) : std::generate_canonical<double, 53>(rng));
      labels.push_back(coin(rng) ? 1 : 0);
    }
    labels[0] = 1;
    labels[1] = 0;
    worst = std::max(worst,
                     std::abs(roc_auc(scores, labels).auc - oracle::pairwise_auc(scores, labels)));
  }
  return {worst <= kAucTol, "20 sets, max |auc - pairwise| " + fmt("%.1e", worst) +
                                " (tol 1e-12)"};
}

// Supervised attack with the default features against the toy target.
struct LeakRun {
  double accuracy = 0.0;
  double auc = 0.0;
  double train_accuracy = 0.0;
};

LeakRun leak_run(std::uint64_t seed, int target_epochs) {
  ExperimentSpec s = toy_spec(Scenario::kOutputsVsGradients);
  const DatasetSplit data = make_synthetic_dataset(4, 8, 50, s.dataset.separation, seed);
  TrainingConfig cfg = s.training;
  cfg.epochs = target_epochs;
  cfg.seed = seed;
  const TrainingResult target = train_centralized(s.architecture(), data, cfg);
  const std::vector<ModelSnapshot> snaps = {target.final_model};
  const AttackSplit split =
      split_for_attack(data.members, data.nonmembers, s.attack.train_fraction, seed);
  const ConditionResult r = evaluate_supervised(
      "default", seed, snaps, split, FeatureConfig::supervised_default(s.architecture()), s);
  return {r.metrics.accuracy, r.auc, target.train_accuracy};
}

Outcome leakage_exists() {
  std::vector<double> acc, auc, untrained, train_acc;
  for (std::uint64_t seed : kSeeds) {
    const LeakRun trained = leak_run(seed, 300);
    acc.push_back(trained.accuracy);
    auc.push_back(trained.auc);
    train_acc.push_back(trained.train_accuracy);
    untrained.push_back(leak_run(seed, 0).accuracy);
  }
  const double min_train = *std::min_element(train_acc.begin(), train_acc.end());
  const double a = median(acc), u = median(auc), n = median(untrained);
  const bool pass = min_train >= kTrainAccuracy && a >= kLeakAccuracy && u >= kLeakAuc &&
                    n >= kChanceLo && n <= kChanceHi;
  return {pass, "min train acc " + fmt("%.3f", min_train) + ", attack acc " + fmt("%.3f", a) +
                    " (>= 0.70), auc " + fmt("%.3f", u) + " (>= 0.75), untrained acc " +
                    fmt("%.3f", n) + " (in [0.4, 0.6])"};
}

Outcome layer_ordering() {
  const ExperimentReport r = run_experiment(toy_spec(Scenario::kLayerDepth));
  const double a = median_of(r, "third_last_layer");
  const double b = median_of(r, "penultimate_layer");
  const double c = median_of(r, "final_layer");
  return {c >= a - kLayerSlack && c >= b - kLayerSlack,
          "third-last " + fmt("%.3f", a) + ", penultimate " + fmt("%.3f", b) + ", final " +
              fmt("%.3f", c) + " (final >= each - 0.03)"};
}

Outcome gradients_vs_outputs() {
  const ExperimentReport r = run_experiment(toy_spec(Scenario::kOutputsVsGradients));
  const double o = median_of(r, "outputs");
  const double g = median_of(r, "gradients");
  return {g >= o - kGradientSlack, "outputs " + fmt("%.3f", o) + ", gradients " +
                                       fmt("%.3f", g) + " (gradients >= outputs - 0.02)"};
}

Outcome gradient_norm_direction() {
  const ExperimentSpec s = toy_spec(Scenario::kLayerDepth);
  const Architecture arch = s.architecture();
  FeatureConfig fc;
  fc.gradient_layers = {dense_layers(arch).back()};
  fc.gradient_mode = GradientMode::kPerLayerNorm;
  fc.include_loss = false;
  fc.include_label = false;
  int holds = 0;
  std::string detail;
  for (std::uint64_t seed : kSeeds) {
    const DatasetSplit data = make_synthetic_dataset(4, 8, 50, s.dataset.separation, seed);
    TrainingConfig cfg = s.training;
    cfg.seed = seed;
    const std::vector<ModelSnapshot> snaps = {train_centralized(arch, data, cfg).final_model};
    auto mean_norm = [&](const LabeledSet& set) {
      double sum = 0.0;
      for (const WhiteBoxFeatures& f : extract_batch(snaps, set, fc)) {
        sum += f.blocks[0].gradient_norms[0];
      }
      return sum / static_cast<double>(set.size());
    };
    const double m = mean_norm(data.members);
    const double n = mean_norm(data.nonmembers);
    if (m < n) ++holds;
    detail += (detail.empty() ? "" : ", ") + fmt("%.3g", m) + "<" + fmt("%.3g", n);
  }
  return {holds == 5, "member<non-member mean norm on " + std::to_string(holds) +
                          "/5 seeds: " + detail};
}

Outcome stage_ordering() {
  const ExperimentReport r = run_experiment(toy_spec(Scenario::kFLStages));
  const std::vector<std::string> names = scenario_conditions(r.spec);
  std::vector<double> m;
  for (const std::string& n : names) m.push_back(median_of(r, n));
  bool monotone = true;
  for (std::size_t i = 1; i < m.size(); ++i) monotone = monotone && m[i] >= m[i - 1] - kStageSlack;
  return {m.back() - m.front() >= kStageGain && monotone,
          "stages " + fmt("%.3f", m[0]) + " " + fmt("%.3f", m[1]) + " " + fmt("%.3f", m[2]) +
              " " + fmt("%.3f", m[3]) + " (latest - earliest >= 0.05, steps >= -0.03)"};
}

Outcome placement_ordering() {
  const ExperimentReport r = run_experiment(toy_spec(Scenario::kFLPlacement));
  const double passive = median_of(r, "global_passive");
  const double active = median_of(r, "global_active");
  const double isolate = median_of(r, "global_active_isolate");
  const double local = median_of(r, "local_passive");
  const bool pass = active >= passive - kActiveSlack && isolate >= passive - kActiveSlack &&
                    passive >= local + kGlobalOverLocal;
  return {pass, "global passive " + fmt("%.3f", passive) + ", active " + fmt("%.3f", active) +
                    ", active+isolate " + fmt("%.3f", isolate) + ", local passive " +
                    fmt("%.3f", local) + " (active >= passive - 0.01, passive >= local + 0.03)"};
}

Outcome unsupervised_attack() {
  ExperimentSpec trained = toy_spec(Scenario::kUnsupervisedCentralized);
  ExperimentSpec untrained = trained;
  untrained.training.epochs = 0;
  const double t = median_of(run_experiment(trained), "spectral");
  const double u = median_of(run_experiment(untrained), "spectral");
  return {t >= kUnsupervisedAccuracy && u >= kChanceLo && u <= kChanceHi,
          "trained " + fmt("%.3f", t) + " (>= 0.60), untrained " + fmt("%.3f", u) +
              " (in [0.4, 0.6])"};
}

Outcome fine_tune_tasks() {
  const ExperimentReport r = run_experiment(toy_spec(Scenario::kFineTune));
  std::size_t rows_a = 0, rows_b = 0;
  for (const ConditionResult& c : r.results) {
    rows_a += c.condition == "D_vs_nonmembers";
    rows_b += c.condition == "D_vs_d";
  }
  const double a = median_of(r, "D_vs_nonmembers");
  const double b = median_of(r, "D_vs_d");
  return {a > kFineTuneAccuracy && b > kFineTuneAccuracy && rows_a == 5 && rows_b == 5,
          "D vs non-members " + fmt("%.3f", a) + ", D vs d " + fmt("%.3f", b) +
              " (both > 0.55, 5 rows each)"};
}

Outcome determinism() {
  ExperimentSpec s = toy_spec(Scenario::kLayerDepth);
  const std::string first = report_csv(run_experiment(s));
  const std::string second = report_csv(run_experiment(s));
  s.parallel_seeds = true;
  const std::string threaded = report_csv(run_experiment(s));

  const ExperimentSpec fs = toy_spec(Scenario::kFLPlacement);
  const auto parts = fl_participants(fs, 11);
  FLConfig cfg = fl_config(fs, 11, fs.federated->rounds);
  cfg.observation_rounds = stage_round_sets(cfg.rounds).back();
  const auto targets = LabeledSet::concat(parts[0].members, parts[1].members);
  const AttackerPlacement active = AttackerPlacement::global_active(0.05, targets, true, 0);
  const RoundLog serial = fl_run(fs.architecture(), parts, cfg, active);
  cfg.parallel = true;
  const RoundLog parallel = fl_run(fs.architecture(), parts, cfg, active);
  const bool pass = first == second && first == threaded && serial == parallel;
  return {pass, std::string("re-run CSV ") + (first == second ? "identical" : "differs") +
                    ", parallel-seed CSV " + (first == threaded ? "identical" : "differs") +
                    ", serial vs parallel FL log " +
                    (serial == parallel ? "bit-identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"fedavg exactness", fedavg_exactness},
      {"auc oracle", auc_oracle},
      {"leakage exists", leakage_exists},
      {"layer depth ordering", layer_ordering},
      {"gradients vs outputs ordering", gradients_vs_outputs},
      {"gradient norm separation", gradient_norm_direction},
      {"federated stage ordering", stage_ordering},
      {"federated placement ordering", placement_ordering},
      {"unsupervised attack", unsupervised_attack},
      {"fine-tune tasks", fine_tune_tasks},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
