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

#include "mialab/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "mialab/snapshot_io.hpp"

namespace mialab {

LabeledSet LabeledSet::subset(std::span<const Index> rows) const {
  LabeledSet out;
  out.x.resize(static_cast<Index>(rows.size()), x.cols());
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Index>(i)) = x.row(rows[i]);
    out.y.push_back(y[rows[i]]);
  }
  return out;
}

LabeledSet LabeledSet::concat(const LabeledSet& a, const LabeledSet& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim() != b.dim()) throw InputError("cannot concatenate sets of different dimension");
  LabeledSet out;
  out.x.resize(a.size() + b.size(), a.dim());
  out.x << a.x, b.x;
  out.y = a.y;
  out.y.insert(out.y.end(), b.y.begin(), b.y.end());
  return out;
}

void TrainingConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (!std::is_sorted(snapshot_epochs.begin(), snapshot_epochs.end()) ||
      std::adjacent_find(snapshot_epochs.begin(), snapshot_epochs.end()) !=
          snapshot_epochs.end()) {
    throw ConfigError("snapshot_epochs must be strictly increasing");
  }
  for (int e : snapshot_epochs) {
    if (e < 1 || e > epochs) {
      throw ConfigError("snapshot epoch " + std::to_string(e) +
                        " outside [1, " + std::to_string(epochs) + "]");
    }
  }
}

ModelSnapshot run_sgd_epochs(const ModelSnapshot& start, const LabeledSet& data,
                             int epochs, int batch_size, double lr, Rng& rng,
                             const EpochCallback& on_epoch) {
  if (data.empty()) throw InputError("training set is empty");
  if (data.dim() != input_dim(start.arch())) {
    throw InputError("training samples do not match the model input width");
  }
  ModelSnapshot model = start;
  std::vector<Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Index{0});
  Eigen::MatrixXd batch;
  std::vector<int> labels;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t lo = 0; lo < order.size(); lo += batch_size) {
      const std::size_t hi = std::min(order.size(), lo + batch_size);
      batch.resize(static_cast<Index>(hi - lo), data.dim());
      labels.resize(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        batch.row(static_cast<Index>(i - lo)) = data.x.row(order[i]);
        labels[i - lo] = data.y[order[i]];
      }
      try {
        const ForwardTrace trace = forward(model, batch, std::span<const int>(labels));
        model = model.with_params(
            sgd_step(model.params(), loss_gradient(model, trace), lr));
      } catch (const NumericError& e) {
        throw NumericError("training diverged in epoch " +
                           std::to_string(epoch) + ": " + e.what());
      }
    }
    if (on_epoch) on_epoch(epoch, model.with_tag(start.tag() + epoch));
  }
  return model.with_tag(start.tag() + epochs);
}

TrainingResult train_centralized(const Architecture& arch,
                                 const DatasetSplit& split,
                                 const TrainingConfig& cfg) {
  cfg.validate();
  if (split.members.empty()) throw InputError("member set is empty");
  Rng init_rng = make_rng(cfg.seed, Stream::kInit);
  Rng shuffle_rng = make_rng(cfg.seed, Stream::kShuffle);
  const ModelSnapshot initial = ModelSnapshot::initialized(arch, init_rng, 0);

  SnapshotSeries snapshots;
  auto next = cfg.snapshot_epochs.begin();
  const EpochCallback capture = [&](int epoch, const ModelSnapshot& model) {
    if (next != cfg.snapshot_epochs.end() && *next == epoch) {
      snapshots.push_back(model);
      ++next;
    }
  };
  ModelSnapshot final_model = run_sgd_epochs(initial, split.members, cfg.epochs,
                                             cfg.batch_size, cfg.lr,
                                             shuffle_rng, capture);
  const double acc = accuracy(final_model, split.members);
  return {std::move(final_model), std::move(snapshots), acc};
}

ModelSnapshot fine_tune(const ModelSnapshot& base, const LabeledSet& finetune_set,
                        const TrainingConfig& cfg) {
  cfg.validate();
  if (finetune_set.empty()) throw InputError("fine-tune set is empty");
  Rng rng = make_rng(cfg.seed, Stream::kFineTune);
  return run_sgd_epochs(base, finetune_set, cfg.epochs, cfg.batch_size, cfg.lr, rng);
}

DatasetSplit make_synthetic_dataset(int num_classes, int dim, int per_class,
                                    double separation, std::uint64_t seed,
                                    int finetune_per_class) {
  if (num_classes < 2 || dim <= 0 || per_class <= 0 || finetune_per_class < 0) {
    throw InputError("dataset counts must be positive (and at least 2 classes)");
  }
  if (num_classes > dim) {
    throw InputError("axis-aligned class means need num_classes <= dim");
  }
  if (!(separation >= 0.0)) throw InputError("separation must be non-negative");

  const double offset = separation / std::sqrt(2.0);
  Rng rng = make_rng(seed, Stream::kData);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto draw = [&](int count) {
    LabeledSet set;
    set.x.resize(static_cast<Index>(count) * num_classes, dim);
    set.y.reserve(static_cast<std::size_t>(count) * num_classes);
    Index row = 0;
    for (int i = 0; i < count; ++i) {
      for (int c = 0; c < num_classes; ++c, ++row) {
        for (int d = 0; d < dim; ++d) set.x(row, d) = noise(rng);
        set.x(row, c) += offset;
        set.y.push_back(c);
      }
    }
    return set;
  };

  DatasetSplit split;
  split.num_classes = num_classes;
  split.members = draw(per_class);
  split.nonmembers = draw(per_class);
  if (finetune_per_class > 0) split.finetune = draw(finetune_per_class);
  return split;
}

double accuracy(const ModelSnapshot& model, const LabeledSet& data) {
  if (data.empty()) throw InputError("accuracy of an empty set");
  const ForwardTrace trace = forward(model, data.x);
  Index correct = 0;
  for (Index r = 0; r < data.size(); ++r) {
    Index arg = 0;
    trace.final_output().row(r).maxCoeff(&arg);
    if (arg == data.y[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double mean_loss(const ModelSnapshot& model, const LabeledSet& data) {
  if (data.empty()) throw InputError("loss of an empty set");
  return forward(model, data.x, std::span<const int>(data.y)).losses.mean();
}

void write_labeled_set_csv(const LabeledSet& data,
                           const std::filesystem::path& path) {
  std::ostringstream os;
  os.precision(17);
  for (Index d = 0; d < data.dim(); ++d) os << 'x' << d << ',';
  os << "label\n";
  for (Index r = 0; r < data.size(); ++r) {
    for (Index d = 0; d < data.dim(); ++d) os << data.x(r, d) << ',';
    os << data.y[r] << '\n';
  }
  write_text_file(path, os.str());
}

LabeledSet read_labeled_set_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": missing header");
  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 2) throw InputError(path.string() + ": need features and a label");
  const Index dim = columns - 1;

  std::vector<double> values;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    Index col = 0;
    try {
      while (std::getline(row, cell, ',')) {
        std::size_t used = 0;
        if (col < dim) {
          values.push_back(std::stod(cell, &used));
        } else {
          labels.push_back(std::stoi(cell, &used));
        }
        if (used != cell.size()) throw std::invalid_argument(cell);
        ++col;
      }
    } catch (const std::exception&) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": malformed value");
    }
    if (col != columns) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(columns) + " columns");
    }
  }
  LabeledSet set;
  set.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(
      values.data(), static_cast<Index>(labels.size()), dim);
  set.y = std::move(labels);
  return set;
}

}  // namespace mialab
