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

// White-box feature extraction: for one sample and a sequence of model
// snapshots, record hidden-layer outputs, output probabilities, loss and
// per-layer parameter gradients, then flatten them in a canonical order.

#ifndef MIALAB_FEATURES_HPP_
#define MIALAB_FEATURES_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mialab/nn.hpp"
#include "mialab/training.hpp"

namespace mialab {

enum class GradientMode { kFull, kPerLayerNorm };

std::string to_string(GradientMode mode);
GradientMode parse_gradient_mode(const std::string& name);

struct FeatureConfig {
  // Layer indices whose outputs are recorded. Naming the final Softmax
  // layer selects the output probabilities.
  std::vector<int> observed_layers;
  // Dense layer indices whose parameter gradients are recorded.
  std::vector<int> gradient_layers;
  GradientMode gradient_mode = GradientMode::kFull;
  bool include_loss = true;
  bool include_label = true;

  void validate(const Architecture& arch) const;

  // Final output + final Dense gradient + loss + label.
  static FeatureConfig supervised_default(const Architecture& arch);
  // Per-layer gradient norms of every Dense layer.
  static FeatureConfig unsupervised_default(const Architecture& arch);

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Indices of the Dense layers, ascending.
std::vector<int> dense_layers(const Architecture& arch);
// Indices of ReLU / Softmax layers, ascending.
std::vector<int> activation_layers(const Architecture& arch);

struct SnapshotFeatures {
  std::int64_t tag = 0;
  // Outputs of the observed layers other than the final Softmax.
  std::vector<Eigen::VectorXd> layer_outputs;
  Eigen::VectorXd output_probs;
  double loss = 0.0;
  // Full mode only: the parameter gradients of each gradient layer.
  std::vector<Params> gradients;
  // L2 norm over each gradient layer's parameters.
  std::vector<double> gradient_norms;

  friend bool operator==(const SnapshotFeatures& a, const SnapshotFeatures& b);
};

struct WhiteBoxFeatures {
  // Ascending by tag.
  std::vector<SnapshotFeatures> blocks;
  Eigen::VectorXd label_onehot;
  int label = 0;

  friend bool operator==(const WhiteBoxFeatures& a, const WhiteBoxFeatures& b);
};

// Snapshots are re-ordered by ascending tag before extraction.
WhiteBoxFeatures extract(std::span<const ModelSnapshot> snapshots,
                         const Eigen::VectorXd& sample, int label,
                         const FeatureConfig& cfg);

std::vector<WhiteBoxFeatures> extract_batch(std::span<const ModelSnapshot> snapshots,
                                            const LabeledSet& samples,
                                            const FeatureConfig& cfg);

// Per snapshot, per gradient layer. Throws if no gradients were recorded.
std::vector<std::vector<double>> gradient_norms(const WhiteBoxFeatures& features);

enum class SegmentKind { kLayerOutput, kOutputProbs, kLoss, kGradient, kLabel };

std::string to_string(SegmentKind kind);

struct Segment {
  SegmentKind kind = SegmentKind::kLoss;
  // Position in the snapshot sequence; -1 for the label.
  int snapshot = -1;
  std::int64_t tag = 0;
  // Layer index for layer outputs and gradients, else -1.
  int layer = -1;
  Index offset = 0;
  Index size = 0;
  // Full-mode gradient segments: shapes of the concatenated tensors.
  std::vector<Shape> tensor_shapes;

  std::string name() const;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct FeatureGeometry {
  std::vector<Segment> segments;
  Index total_size = 0;
  GradientMode gradient_mode = GradientMode::kFull;

  std::vector<Index> segment_sizes() const;
  friend bool operator==(const FeatureGeometry&, const FeatureGeometry&) = default;
};

nlohmann::json to_json(const FeatureGeometry& geometry);
FeatureGeometry geometry_from_json(const nlohmann::json& doc);

struct FlatFeatures {
  Eigen::VectorXd values;
  FeatureGeometry geometry;
};

// Per snapshot (ascending tag): layer outputs by layer index, output
// probabilities, loss, gradients by layer index; then the one-hot label.
FlatFeatures feature_vector(const WhiteBoxFeatures& features,
                            const FeatureConfig& cfg);

// Inverse of feature_vector for the components the geometry records.
WhiteBoxFeatures unflatten(const Eigen::VectorXd& values,
                           const FeatureGeometry& geometry);

// One flattened sample per row; all rows share `geometry`.
Eigen::MatrixXd feature_matrix(std::span<const WhiteBoxFeatures> features,
                               const FeatureConfig& cfg, FeatureGeometry* geometry);

// Delimited text, one row per sample with an optional membership column,
// plus `<path>.geometry.json` describing the column segments.
void write_feature_matrix(const Eigen::MatrixXd& matrix,
                          std::span<const int> membership,
                          const FeatureGeometry& geometry,
                          const std::filesystem::path& path);

}  // namespace mialab

#endif  // MIALAB_FEATURES_HPP_
