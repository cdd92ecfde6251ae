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

#include "mialab/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mialab/snapshot_io.hpp"

namespace mialab {

using nlohmann::json;

namespace {

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string to_string(GradientMode mode) {
  return mode == GradientMode::kFull ? "full" : "per_layer_norm";
}

GradientMode parse_gradient_mode(const std::string& name) {
  if (name == "full") return GradientMode::kFull;
  if (name == "per_layer_norm") return GradientMode::kPerLayerNorm;
  throw ConfigError("unknown gradient mode '" + name + "'");
}

std::vector<int> dense_layers(const Architecture& arch) {
  std::vector<int> out;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (arch[i].kind == LayerKind::kDense) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> activation_layers(const Architecture& arch) {
  std::vector<int> out;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (arch[i].kind != LayerKind::kDense) out.push_back(static_cast<int>(i));
  }
  return out;
}

void FeatureConfig::validate(const Architecture& arch) const {
  const int layers = static_cast<int>(arch.size());
  for (int l : observed_layers) {
    if (l < 0 || l >= layers) {
      throw ConfigError("observed layer " + std::to_string(l) + " out of range");
    }
  }
  for (int l : gradient_layers) {
    if (l < 0 || l >= layers || arch[static_cast<std::size_t>(l)].kind != LayerKind::kDense) {
      throw ConfigError("gradient layer " + std::to_string(l) +
                        " is not a Dense layer");
    }
  }
}

FeatureConfig FeatureConfig::supervised_default(const Architecture& arch) {
  FeatureConfig cfg;
  cfg.observed_layers = {static_cast<int>(arch.size()) - 1};
  cfg.gradient_layers = {dense_layers(arch).back()};
  cfg.gradient_mode = GradientMode::kFull;
  return cfg;
}

FeatureConfig FeatureConfig::unsupervised_default(const Architecture& arch) {
  FeatureConfig cfg;
  cfg.gradient_layers = dense_layers(arch);
  cfg.gradient_mode = GradientMode::kPerLayerNorm;
  cfg.include_loss = false;
  cfg.include_label = false;
  return cfg;
}

bool operator==(const SnapshotFeatures& a, const SnapshotFeatures& b) {
  if (a.tag != b.tag || a.loss != b.loss || !same_vector(a.output_probs, b.output_probs) ||
      a.gradients != b.gradients || a.gradient_norms != b.gradient_norms ||
      a.layer_outputs.size() != b.layer_outputs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.layer_outputs.size(); ++i) {
    if (!same_vector(a.layer_outputs[i], b.layer_outputs[i])) return false;
  }
  return true;
}

bool operator==(const WhiteBoxFeatures& a, const WhiteBoxFeatures& b) {
  return a.label == b.label && same_vector(a.label_onehot, b.label_onehot) &&
         a.blocks == b.blocks;
}

WhiteBoxFeatures extract(std::span<const ModelSnapshot> snapshots,
                         const Eigen::VectorXd& sample, int label,
                         const FeatureConfig& cfg) {
  if (snapshots.empty()) throw InputError("no snapshots to extract from");
  const Architecture& arch = snapshots.front().arch();
  for (const ModelSnapshot& s : snapshots) {
    if (s.arch() != arch) throw InputError("snapshots do not share an architecture");
  }
  if (!ends_with_softmax(arch)) throw InputError("target model must end in Softmax");
  cfg.validate(arch);
  const std::vector<int> observed = sorted_unique(cfg.observed_layers);
  const std::vector<int> grad_layers = sorted_unique(cfg.gradient_layers);
  const std::vector<int> offsets = parameter_offsets(arch);
  const int final_layer = static_cast<int>(arch.size()) - 1;

  std::vector<std::size_t> order(snapshots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return snapshots[a].tag() < snapshots[b].tag();
  });

  const Eigen::MatrixXd batch = sample.transpose();
  const int labels[] = {label};
  WhiteBoxFeatures out;
  out.label = label;
  out.label_onehot = Eigen::VectorXd::Zero(output_dim(arch));
  out.label_onehot[label] = 1.0;
  for (std::size_t idx : order) {
    const ModelSnapshot& model = snapshots[idx];
    const ForwardTrace trace = forward(model, batch, std::span<const int>(labels));
    SnapshotFeatures block;
    block.tag = model.tag();
    for (int l : observed) {
      if (l == final_layer) continue;
      block.layer_outputs.push_back(trace.outputs[static_cast<std::size_t>(l)].row(0).transpose());
    }
    block.output_probs = trace.final_output().row(0).transpose();
    block.loss = trace.losses[0];
    if (!grad_layers.empty()) {
      const Params grads = loss_gradient(model, trace);
      for (int l : grad_layers) {
        const int first = offsets[static_cast<std::size_t>(l)];
        const int count = parameter_count(arch, static_cast<std::size_t>(l));
        Params layer_grads(grads.begin() + first, grads.begin() + first + count);
        double sq = 0.0;
        for (const Tensor& t : layer_grads) sq += t.squared_norm();
        block.gradient_norms.push_back(std::sqrt(sq));
        if (cfg.gradient_mode == GradientMode::kFull) {
          block.gradients.push_back(std::move(layer_grads));
        }
      }
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

std::vector<WhiteBoxFeatures> extract_batch(std::span<const ModelSnapshot> snapshots,
                                            const LabeledSet& samples,
                                            const FeatureConfig& cfg) {
  std::vector<WhiteBoxFeatures> out;
  out.reserve(static_cast<std::size_t>(samples.size()));
  for (Index i = 0; i < samples.size(); ++i) {
    out.push_back(extract(snapshots, samples.sample(i), samples.y[i], cfg));
  }
  return out;
}

std::vector<std::vector<double>> gradient_norms(const WhiteBoxFeatures& features) {
  std::vector<std::vector<double>> out;
  for (const SnapshotFeatures& block : features.blocks) {
    if (block.gradient_norms.empty()) {
      throw InputError("features carry no gradients");
    }
    out.push_back(block.gradient_norms);
  }
  if (out.empty()) throw InputError("features carry no gradients");
  return out;
}

std::string to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kLayerOutput:
      return "layer_output";
    case SegmentKind::kOutputProbs:
      return "output_probs";
    case SegmentKind::kLoss:
      return "loss";
    case SegmentKind::kGradient:
      return "gradient";
    case SegmentKind::kLabel:
      return "label";
  }
  return "unknown";
}

namespace {

SegmentKind parse_segment_kind(const std::string& name) {
  for (SegmentKind k : {SegmentKind::kLayerOutput, SegmentKind::kOutputProbs,
                        SegmentKind::kLoss, SegmentKind::kGradient, SegmentKind::kLabel}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown segment kind '" + name + "'");
}

}  // namespace

std::string Segment::name() const {
  std::ostringstream os;
  if (snapshot >= 0) os << "s" << snapshot << ".";
  os << to_string(kind);
  if (layer >= 0) os << "." << layer;
  return os.str();
}

std::vector<Index> FeatureGeometry::segment_sizes() const {
  std::vector<Index> sizes;
  for (const Segment& s : segments) sizes.push_back(s.size);
  return sizes;
}

json to_json(const FeatureGeometry& geometry) {
  json segments = json::array();
  for (const Segment& s : geometry.segments) {
    segments.push_back({{"kind", to_string(s.kind)},
                        {"snapshot", s.snapshot},
                        {"tag", s.tag},
                        {"layer", s.layer},
                        {"offset", s.offset},
                        {"size", s.size},
                        {"tensor_shapes", s.tensor_shapes}});
  }
  return {{"format", "mialab.feature_geometry"},
          {"gradient_mode", to_string(geometry.gradient_mode)},
          {"total_size", geometry.total_size},
          {"segments", std::move(segments)}};
}

FeatureGeometry geometry_from_json(const json& doc) {
  FeatureGeometry g;
  try {
    g.gradient_mode = parse_gradient_mode(doc.at("gradient_mode").get<std::string>());
    g.total_size = doc.at("total_size").get<Index>();
    Index expected = 0;
    for (const json& s : doc.at("segments")) {
      Segment seg;
      seg.kind = parse_segment_kind(s.at("kind").get<std::string>());
      seg.snapshot = s.at("snapshot").get<int>();
      seg.tag = s.at("tag").get<std::int64_t>();
      seg.layer = s.at("layer").get<int>();
      seg.offset = s.at("offset").get<Index>();
      seg.size = s.at("size").get<Index>();
      seg.tensor_shapes = s.at("tensor_shapes").get<std::vector<Shape>>();
      if (seg.offset != expected || seg.size <= 0) {
        throw InputError("feature geometry segments are not contiguous");
      }
      expected += seg.size;
      g.segments.push_back(std::move(seg));
    }
    if (expected != g.total_size) throw InputError("feature geometry size mismatch");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed feature geometry: ") + e.what());
  }
  return g;
}

FlatFeatures feature_vector(const WhiteBoxFeatures& features,
                            const FeatureConfig& cfg) {
  FlatFeatures out;
  FeatureGeometry& g = out.geometry;
  g.gradient_mode = cfg.gradient_mode;
  std::vector<double> values;
  auto add = [&](Segment seg, const auto& data) {
    seg.offset = static_cast<Index>(values.size());
    seg.size = static_cast<Index>(data.size());
    values.insert(values.end(), data.data(), data.data() + data.size());
    g.segments.push_back(std::move(seg));
  };

  const std::vector<int> observed = sorted_unique(cfg.observed_layers);
  const std::vector<int> grad_layers = sorted_unique(cfg.gradient_layers);
  for (std::size_t s = 0; s < features.blocks.size(); ++s) {
    const SnapshotFeatures& block = features.blocks[s];
    const int snap = static_cast<int>(s);
    // The final Softmax layer, when observed, is the output_probs segment.
    const bool final_observed = observed.size() > block.layer_outputs.size();
    if (observed.size() - (final_observed ? 1 : 0) != block.layer_outputs.size()) {
      throw InputError("features do not match the feature configuration");
    }
    for (std::size_t i = 0; i < block.layer_outputs.size(); ++i) {
      add({SegmentKind::kLayerOutput, snap, block.tag, observed[i]}, block.layer_outputs[i]);
    }
    if (final_observed) add({SegmentKind::kOutputProbs, snap, block.tag}, block.output_probs);
    if (cfg.include_loss) {
      add({SegmentKind::kLoss, snap, block.tag}, std::vector<double>{block.loss});
    }
    if (grad_layers.size() != block.gradient_norms.size()) {
      throw InputError("features do not carry the configured gradients");
    }
    for (std::size_t i = 0; i < grad_layers.size(); ++i) {
      Segment seg{SegmentKind::kGradient, snap, block.tag, grad_layers[i]};
      if (cfg.gradient_mode == GradientMode::kFull) {
        if (block.gradients.size() != grad_layers.size()) {
          throw InputError("full gradients were not extracted");
        }
        const Params& tensors = block.gradients[i];
        for (const Tensor& t : tensors) seg.tensor_shapes.push_back(t.shape());
        add(std::move(seg), flatten(tensors));
      } else {
        add(std::move(seg), std::vector<double>{block.gradient_norms[i]});
      }
    }
  }
  if (cfg.include_label) add({SegmentKind::kLabel, -1, 0}, features.label_onehot);
  g.total_size = static_cast<Index>(values.size());
  out.values = Eigen::Map<const Eigen::VectorXd>(values.data(), g.total_size);
  return out;
}

WhiteBoxFeatures unflatten(const Eigen::VectorXd& values,
                           const FeatureGeometry& geometry) {
  if (values.size() != geometry.total_size) {
    throw InputError("feature vector length does not match its geometry");
  }
  WhiteBoxFeatures out;
  out.label = -1;
  for (const Segment& seg : geometry.segments) {
    const Eigen::VectorXd part = values.segment(seg.offset, seg.size);
    if (seg.kind == SegmentKind::kLabel) {
      out.label_onehot = part;
      Index arg = 0;
      part.maxCoeff(&arg);
      out.label = static_cast<int>(arg);
      continue;
    }
    while (out.blocks.size() <= static_cast<std::size_t>(seg.snapshot)) {
      out.blocks.emplace_back();
    }
    SnapshotFeatures& block = out.blocks[static_cast<std::size_t>(seg.snapshot)];
    block.tag = seg.tag;
    switch (seg.kind) {
      case SegmentKind::kLayerOutput:
        block.layer_outputs.push_back(part);
        break;
      case SegmentKind::kOutputProbs:
        block.output_probs = part;
        break;
      case SegmentKind::kLoss:
        block.loss = part[0];
        break;
      case SegmentKind::kGradient:
        if (geometry.gradient_mode == GradientMode::kFull) {
          Params tensors;
          Index offset = 0;
          double sq = 0.0;
          for (const Shape& shape : seg.tensor_shapes) {
            const Index n = shape_size(shape);
            tensors.emplace_back(shape, part.segment(offset, n));
            sq += tensors.back().squared_norm();
            offset += n;
          }
          block.gradient_norms.push_back(std::sqrt(sq));
          block.gradients.push_back(std::move(tensors));
        } else {
          block.gradient_norms.push_back(part[0]);
        }
        break;
      case SegmentKind::kLabel:
        break;
    }
  }
  return out;
}

Eigen::MatrixXd feature_matrix(std::span<const WhiteBoxFeatures> features,
                               const FeatureConfig& cfg, FeatureGeometry* geometry) {
  if (features.empty()) throw InputError("no features to stack");
  FlatFeatures first = feature_vector(features.front(), cfg);
  Eigen::MatrixXd out(static_cast<Index>(features.size()), first.values.size());
  out.row(0) = first.values.transpose();
  for (std::size_t i = 1; i < features.size(); ++i) {
    FlatFeatures f = feature_vector(features[i], cfg);
    if (f.geometry.segment_sizes() != first.geometry.segment_sizes()) {
      throw InputError("samples have different feature geometry");
    }
    out.row(static_cast<Index>(i)) = f.values.transpose();
  }
  if (geometry) *geometry = std::move(first.geometry);
  return out;
}

void write_feature_matrix(const Eigen::MatrixXd& matrix,
                          std::span<const int> membership,
                          const FeatureGeometry& geometry,
                          const std::filesystem::path& path) {
  if (matrix.cols() != geometry.total_size) {
    throw InputError("feature matrix width does not match geometry");
  }
  if (!membership.empty() && static_cast<Index>(membership.size()) != matrix.rows()) {
    throw InputError("membership column length mismatch");
  }
  std::ostringstream os;
  os.precision(17);
  for (const Segment& seg : geometry.segments) {
    for (Index i = 0; i < seg.size; ++i) {
      os << (seg.offset + i ? "," : "") << seg.name() << "[" << i << "]";
    }
  }
  if (!membership.empty()) os << ",member";
  os << "\n";
  for (Index r = 0; r < matrix.rows(); ++r) {
    for (Index c = 0; c < matrix.cols(); ++c) os << (c ? "," : "") << matrix(r, c);
    if (!membership.empty()) os << "," << membership[static_cast<std::size_t>(r)];
    os << "\n";
  }
  write_text_file(path, os.str());
  std::filesystem::path sidecar = path;
  sidecar += ".geometry.json";
  write_text_file(sidecar, to_json(geometry).dump(1) + "\n");
}

}  // namespace mialab
