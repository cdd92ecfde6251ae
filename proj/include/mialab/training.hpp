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

// Centralised target training: synthetic Gaussian-blob datasets, seeded
// mini-batch SGD with snapshotting, and fine-tuning of a trained model.

#ifndef MIALAB_TRAINING_HPP_
#define MIALAB_TRAINING_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "mialab/nn.hpp"
#include "mialab/rng.hpp"

namespace mialab {

// Samples as rows of `x` with integer class labels.
struct LabeledSet {
  Eigen::MatrixXd x;
  std::vector<int> y;

  Index size() const { return x.rows(); }
  Index dim() const { return x.cols(); }
  bool empty() const { return x.rows() == 0; }

  Eigen::VectorXd sample(Index i) const { return x.row(i).transpose(); }

  LabeledSet subset(std::span<const Index> rows) const;
  static LabeledSet concat(const LabeledSet& a, const LabeledSet& b);

  friend bool operator==(const LabeledSet& a, const LabeledSet& b) {
    return a.y == b.y && a.x.rows() == b.x.rows() && a.x.cols() == b.x.cols() &&
           (a.x.array() == b.x.array()).all();
  }
};

// Members D, disjoint non-members D', and an optional fine-tune set d.
struct DatasetSplit {
  LabeledSet members;
  LabeledSet nonmembers;
  LabeledSet finetune;
  int num_classes = 0;
};

struct TrainingConfig {
  int epochs = 200;
  int batch_size = 32;
  double lr = 0.05;
  std::uint64_t seed = 0;
  // Sorted epoch indices in [1, epochs] at which snapshots are taken.
  std::vector<int> snapshot_epochs;

  void validate() const;
  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

using SnapshotSeries = std::vector<ModelSnapshot>;

struct TrainingResult {
  ModelSnapshot final_model;
  SnapshotSeries snapshots;
  double train_accuracy = 0.0;
};

// Called after every completed epoch (1-based) with the current model.
using EpochCallback = std::function<void(int, const ModelSnapshot&)>;

// Mini-batch SGD over `data`: a fresh shuffle from `rng` each epoch, the
// trailing partial batch kept. The result is tagged start.tag() + epochs.
ModelSnapshot run_sgd_epochs(const ModelSnapshot& start, const LabeledSet& data,
                             int epochs, int batch_size, double lr, Rng& rng,
                             const EpochCallback& on_epoch = {});

// Trains a freshly initialised model on split.members only.
TrainingResult train_centralized(const Architecture& arch,
                                 const DatasetSplit& split,
                                 const TrainingConfig& cfg);

// Continues SGD from `base` on the fine-tune set only.
ModelSnapshot fine_tune(const ModelSnapshot& base, const LabeledSet& finetune_set,
                        const TrainingConfig& cfg);

// Gaussian clusters with unit covariance; class c has mean
// (separation / sqrt 2) * e_c so every pair of means is `separation` apart.
// Members and non-members each hold `per_class` samples of every class;
// the fine-tune set holds `finetune_per_class`.
DatasetSplit make_synthetic_dataset(int num_classes, int dim, int per_class,
                                    double separation, std::uint64_t seed,
                                    int finetune_per_class = 0);

double accuracy(const ModelSnapshot& model, const LabeledSet& data);
double mean_loss(const ModelSnapshot& model, const LabeledSet& data);

// Delimited text: header "x0,...,x{d-1},label", then one sample per row.
void write_labeled_set_csv(const LabeledSet& data,
                           const std::filesystem::path& path);
LabeledSet read_labeled_set_csv(const std::filesystem::path& path);

}  // namespace mialab

#endif  // MIALAB_TRAINING_HPP_
