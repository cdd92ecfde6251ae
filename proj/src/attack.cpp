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

#include "mialab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mialab/snapshot_io.hpp"

namespace mialab {

using nlohmann::json;

namespace {

Architecture submodule_arch(Index in, const std::vector<Index>& hidden) {
  Architecture arch;
  Index width = in;
  for (Index h : hidden) {
    arch.push_back(LayerSpec::dense(width, h));
    arch.push_back(LayerSpec::relu(h));
    width = h;
  }
  return arch;
}

Architecture encoder_arch(Index in, const std::vector<Index>& hidden) {
  Architecture arch = submodule_arch(in, hidden);
  arch.push_back(LayerSpec::dense(hidden.empty() ? in : hidden.back(), 1));
  return arch;
}

std::vector<Index> offsets_of(const std::vector<Index>& sizes) {
  std::vector<Index> offsets(sizes.size(), 0);
  for (std::size_t i = 1; i < sizes.size(); ++i) offsets[i] = offsets[i - 1] + sizes[i - 1];
  return offsets;
}

// Softplus(z) - t z, the binary cross-entropy of sigmoid(z) against t.
double bce_from_logit(double z, double t) {
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - t * z;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

AttackNetSpec AttackNetSpec::for_geometry(const FeatureGeometry& geometry,
                                          std::vector<Index> submodule_hidden,
                                          std::vector<Index> encoder_hidden) {
  AttackNetSpec spec;
  spec.segment_sizes = geometry.segment_sizes();
  spec.submodule_hidden = std::move(submodule_hidden);
  spec.encoder_hidden = std::move(encoder_hidden);
  spec.validate();
  return spec;
}

void AttackNetSpec::validate() const {
  if (segment_sizes.empty()) throw ConfigError("attack net needs at least one segment");
  for (Index s : segment_sizes) {
    if (s <= 0) throw ConfigError("attack net segment sizes must be positive");
  }
  if (submodule_hidden.empty()) throw ConfigError("submodules need a hidden layer");
  for (Index h : submodule_hidden) {
    if (h <= 0) throw ConfigError("hidden sizes must be positive");
  }
  for (Index h : encoder_hidden) {
    if (h <= 0) throw ConfigError("hidden sizes must be positive");
  }
}

Index AttackNetSpec::input_size() const {
  return std::accumulate(segment_sizes.begin(), segment_sizes.end(), Index{0});
}

AttackNet::AttackNet(const AttackNetSpec& spec, Rng& rng)
    : segment_sizes_(spec.segment_sizes),
      segment_offsets_(offsets_of(spec.segment_sizes)),
      encoder_([&] {
        spec.validate();
        const Index concat = spec.submodule_hidden.back() *
                             static_cast<Index>(spec.segment_sizes.size());
        return ModelSnapshot(encoder_arch(concat, spec.encoder_hidden),
                             initialize_params<double>(
                                 encoder_arch(concat, spec.encoder_hidden), rng));
      }()) {
  for (Index size : segment_sizes_) {
    submodules_.push_back(ModelSnapshot::initialized(
        submodule_arch(size, spec.submodule_hidden), rng));
  }
}

AttackNet::AttackNet(std::vector<Index> segment_sizes,
                     std::vector<ModelSnapshot> submodules, ModelSnapshot encoder)
    : segment_sizes_(std::move(segment_sizes)),
      segment_offsets_(offsets_of(segment_sizes_)),
      submodules_(std::move(submodules)),
      encoder_(std::move(encoder)) {
  if (submodules_.size() != segment_sizes_.size()) {
    throw InputError("one submodule per feature segment required");
  }
  Index concat = 0;
  for (std::size_t i = 0; i < submodules_.size(); ++i) {
    if (input_dim(submodules_[i].arch()) != segment_sizes_[i]) {
      throw InputError("submodule input does not match its segment size");
    }
    concat += output_dim(submodules_[i].arch());
  }
  if (input_dim(encoder_.arch()) != concat || output_dim(encoder_.arch()) != 1) {
    throw InputError("encoder must map the concatenated submodule outputs to one score");
  }
}

Eigen::VectorXd AttackNet::logits(const Eigen::MatrixXd& x) const {
  const Index total = segment_offsets_.back() + segment_sizes_.back();
  if (x.cols() != total) throw InputError("feature width does not match the attack net");
  std::vector<Eigen::MatrixXd> parts;
  Index concat = 0;
  for (std::size_t i = 0; i < submodules_.size(); ++i) {
    const Eigen::MatrixXd seg = x.middleCols(segment_offsets_[i], segment_sizes_[i]);
    parts.push_back(forward(submodules_[i], seg).final_output());
    concat += parts.back().cols();
  }
  Eigen::MatrixXd joined(x.rows(), concat);
  Index col = 0;
  for (const auto& p : parts) {
    joined.middleCols(col, p.cols()) = p;
    col += p.cols();
  }
  return forward(encoder_, joined).final_output().col(0);
}

AttackNet::LossAndGradient AttackNet::loss_gradient(
    const Eigen::MatrixXd& x, std::span<const double> targets) const {
  if (static_cast<Index>(targets.size()) != x.rows() || x.rows() == 0) {
    throw InputError("one target per feature row required");
  }
  std::vector<ForwardTrace> sub_traces;
  Index concat = 0;
  for (std::size_t i = 0; i < submodules_.size(); ++i) {
    sub_traces.push_back(forward(
        submodules_[i], Eigen::MatrixXd(x.middleCols(segment_offsets_[i], segment_sizes_[i]))));
    concat += sub_traces.back().final_output().cols();
  }
  Eigen::MatrixXd joined(x.rows(), concat);
  std::vector<Index> join_offsets;
  Index col = 0;
  for (const auto& t : sub_traces) {
    join_offsets.push_back(col);
    joined.middleCols(col, t.final_output().cols()) = t.final_output();
    col += t.final_output().cols();
  }
  const ForwardTrace enc_trace = forward(encoder_, joined);
  const Eigen::VectorXd z = enc_trace.final_output().col(0);

  LossAndGradient out;
  Eigen::MatrixXd dz(x.rows(), 1);
  const double n = static_cast<double>(x.rows());
  for (Index r = 0; r < x.rows(); ++r) {
    out.loss += bce_from_logit(z[r], targets[r]) / n;
    dz(r, 0) = (sigmoid(z[r]) - targets[r]) / n;
  }
  if (!std::isfinite(out.loss)) throw NumericError("attack loss is not finite");

  BasicGradients<double> enc_grads = backward(encoder_, enc_trace, dz);
  for (std::size_t i = 0; i < submodules_.size(); ++i) {
    const Eigen::MatrixXd g = enc_grads.input.middleCols(
        join_offsets[i], sub_traces[i].final_output().cols());
    out.gradients.push_back(backward(submodules_[i], sub_traces[i], g).params);
  }
  out.gradients.push_back(std::move(enc_grads.params));
  return out;
}

std::vector<Params> AttackNet::params() const {
  std::vector<Params> out;
  for (const auto& s : submodules_) out.push_back(s.params());
  out.push_back(encoder_.params());
  return out;
}

AttackNet AttackNet::with_params(const std::vector<Params>& params) const {
  if (params.size() != submodules_.size() + 1) {
    throw InputError("attack net parameter groups mismatch");
  }
  std::vector<ModelSnapshot> subs;
  for (std::size_t i = 0; i < submodules_.size(); ++i) {
    subs.push_back(submodules_[i].with_params(params[i]));
  }
  return AttackNet(segment_sizes_, std::move(subs), encoder_.with_params(params.back()));
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw InputError("cannot standardise zero rows");
  Standardizer s;
  s.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() / static_cast<double>(rows.rows()))
                .sqrt()
                .transpose();
  for (Index i = 0; i < s.scale.size(); ++i) {
    if (!(s.scale[i] > 1e-12)) s.scale[i] = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) throw InputError("standardiser width mismatch");
  return ((rows.rowwise() - mean.transpose()).array().rowwise() /
          scale.transpose().array())
      .matrix();
}

void AttackTrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("attack epochs must be non-negative");
  if (batch_size <= 0) throw ConfigError("attack batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("attack lr must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
}

AttackModel train_supervised_attack(const Eigen::MatrixXd& features,
                                    std::span<const int> membership,
                                    const FeatureGeometry& geometry,
                                    const AttackNetSpec& spec,
                                    const AttackTrainConfig& cfg) {
  cfg.validate();
  if (static_cast<Index>(membership.size()) != features.rows()) {
    throw InputError("one membership bit per feature row required");
  }
  if (features.cols() != geometry.total_size || spec.input_size() != geometry.total_size) {
    throw InputError("features, geometry and attack net disagree on width");
  }
  const auto members = std::count(membership.begin(), membership.end(), 1);
  if (members == 0 || members == static_cast<long>(membership.size())) {
    throw InputError("supervised attack needs both members and non-members");
  }

  Standardizer standardizer = Standardizer::fit(features);
  const Eigen::MatrixXd x = standardizer.apply(features);
  std::vector<double> targets(membership.begin(), membership.end());

  Rng init_rng = make_rng(cfg.seed, Stream::kAttackInit);
  Rng shuffle_rng = make_rng(cfg.seed, Stream::kAttackShuffle);
  AttackNet net(spec, init_rng);

  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  Eigen::MatrixXd batch;
  std::vector<double> batch_targets;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      batch.resize(static_cast<Index>(hi - lo), x.cols());
      batch_targets.resize(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        batch.row(static_cast<Index>(i - lo)) = x.row(order[i]);
        batch_targets[i - lo] = targets[static_cast<std::size_t>(order[i])];
      }
      try {
        const auto lg = net.loss_gradient(batch, batch_targets);
        std::vector<Params> params = net.params();
        for (std::size_t g = 0; g < params.size(); ++g) {
          params[g] = sgd_step(params[g], lg.gradients[g], cfg.lr);
        }
        net = net.with_params(params);
      } catch (const NumericError& e) {
        throw NumericError("attack training diverged in epoch " +
                           std::to_string(epoch) + ": " + e.what());
      }
    }
  }
  return AttackModel{std::move(net), std::move(standardizer), geometry};
}

AttackModel train_supervised_attack(std::span<const LabeledFeatures> labeled,
                                    const FeatureConfig& feature_cfg,
                                    const AttackTrainConfig& cfg,
                                    std::vector<Index> submodule_hidden,
                                    std::vector<Index> encoder_hidden) {
  std::vector<WhiteBoxFeatures> features;
  std::vector<int> membership;
  for (const LabeledFeatures& l : labeled) {
    features.push_back(l.features);
    membership.push_back(l.member);
  }
  FeatureGeometry geometry;
  const Eigen::MatrixXd x = feature_matrix(features, feature_cfg, &geometry);
  const AttackNetSpec spec = AttackNetSpec::for_geometry(
      geometry, std::move(submodule_hidden), std::move(encoder_hidden));
  return train_supervised_attack(x, membership, geometry, spec, cfg);
}

std::vector<double> membership_scores(const AttackModel& model,
                                      const Eigen::MatrixXd& raw_features) {
  if (raw_features.cols() != model.geometry.total_size) {
    throw InputError("feature geometry does not match the trained attack");
  }
  const Eigen::MatrixXd x = model.standardizer.apply(raw_features);
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(x.rows()));
  for (Index r = 0; r < x.rows(); ++r) {
    scores.push_back(sigmoid(model.net.logits(x.row(r))[0]));
  }
  return scores;
}

MembershipPrediction predict_membership(const AttackModel& model,
                                        const WhiteBoxFeatures& features,
                                        const FeatureConfig& feature_cfg) {
  const FlatFeatures flat = feature_vector(features, feature_cfg);
  if (flat.geometry.segment_sizes() != model.geometry.segment_sizes()) {
    throw InputError("feature geometry does not match the trained attack");
  }
  const double score = membership_scores(model, flat.values.transpose()).front();
  return {score, score >= 0.5};
}

void save_attack_model(const AttackModel& model, const std::filesystem::path& path) {
  json subs = json::array();
  for (const auto& s : model.net.submodules()) subs.push_back(to_json(s));
  const json doc = {{"format", "mialab.attack_model"},
                    {"segment_sizes", model.net.segment_sizes()},
                    {"submodules", std::move(subs)},
                    {"encoder", to_json(model.net.encoder())}};
  write_text_file(path, doc.dump(1) + "\n");
  const auto& m = model.standardizer.mean;
  const auto& s = model.standardizer.scale;
  const json sidecar = {
      {"format", "mialab.attack_standardizer"},
      {"mean", std::vector<double>(m.data(), m.data() + m.size())},
      {"scale", std::vector<double>(s.data(), s.data() + s.size())},
      {"geometry", to_json(model.geometry)}};
  std::filesystem::path side = path;
  side += ".standardizer.json";
  write_text_file(side, sidecar.dump(1) + "\n");
}

AttackModel load_attack_model(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  std::filesystem::path side = path;
  side += ".standardizer.json";
  const json sidecar = read_json_file(side);
  try {
    if (doc.at("format").get<std::string>() != "mialab.attack_model") {
      throw InputError("not an attack model document");
    }
    std::vector<ModelSnapshot> subs;
    for (const json& s : doc.at("submodules")) subs.push_back(snapshot_from_json(s));
    AttackNet net(doc.at("segment_sizes").get<std::vector<Index>>(), std::move(subs),
                  snapshot_from_json(doc.at("encoder")));
    const auto mean = sidecar.at("mean").get<std::vector<double>>();
    const auto scale = sidecar.at("scale").get<std::vector<double>>();
    Standardizer st;
    st.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Index>(mean.size()));
    st.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Index>(scale.size()));
    FeatureGeometry geometry = geometry_from_json(sidecar.at("geometry"));
    if (st.mean.size() != geometry.total_size || st.scale.size() != geometry.total_size) {
      throw InputError("standardiser width does not match geometry");
    }
    return AttackModel{std::move(net), std::move(st), std::move(geometry)};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed attack model: ") + e.what());
  }
}

ClusterResult kmeans(const Eigen::MatrixXd& rows, int k, Rng& rng, int restarts) {
  const Index n = rows.rows();
  if (k < 1 || n < k) throw InputError("k-means needs at least k points");
  ClusterResult best;
  double best_inertia = std::numeric_limits<double>::infinity();
  bool best_empty = true;
  for (int attempt = 0; attempt < restarts; ++attempt) {
    // k-means++ seeding.
    Eigen::MatrixXd centers(k, rows.cols());
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.row(0) = rows.row(pick(rng));
    Eigen::VectorXd d2 = (rows.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double total = d2.sum();
      Index chosen = pick(rng);
      if (total > 0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        for (chosen = 0; chosen < n - 1; ++chosen) {
          target -= d2[chosen];
          if (target <= 0) break;
        }
      }
      centers.row(c) = rows.row(chosen);
      d2 = d2.cwiseMin((rows.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < 300; ++iter) {
      bool changed = false;
      for (Index i = 0; i < n; ++i) {
        Index arg = 0;
        (centers.rowwise() - rows.row(i)).rowwise().squaredNorm().minCoeff(&arg);
        if (labels[static_cast<std::size_t>(i)] != arg) {
          labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
          changed = true;
        }
      }
      if (!changed) break;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
      std::vector<Index> counts(static_cast<std::size_t>(k), 0);
      for (Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
          centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
      }
    }
    double inertia = 0.0;
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      inertia += (rows.row(i) - centers.row(c)).squaredNorm();
      ++counts[static_cast<std::size_t>(c)];
    }
    const bool empty = std::count(counts.begin(), counts.end(), Index{0}) > 0;
    // Prefer restarts that use every cluster, then lower inertia.
    if ((best_empty && !empty) || (empty == best_empty && inertia < best_inertia)) {
      best_inertia = inertia;
      best_empty = empty;
      best.labels = std::move(labels);
    }
  }
  // Canonical numbering: clusters in order of first appearance.
  std::vector<int> rename(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int& l : best.labels) {
    if (rename[static_cast<std::size_t>(l)] < 0) rename[static_cast<std::size_t>(l)] = next++;
    l = rename[static_cast<std::size_t>(l)];
  }
  best.degenerate = next < k;
  return best;
}

ClusterResult spectral_cluster_affinity(const Eigen::MatrixXd& affinity, int k,
                                        std::uint64_t seed) {
  const Index n = affinity.rows();
  if (affinity.cols() != n) throw InputError("affinity matrix must be square");
  if (k < 1 || n < k) throw InputError("spectral clustering needs at least k points");
  Eigen::VectorXd inv_sqrt_degree = affinity.rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    const double d = inv_sqrt_degree[i];
    inv_sqrt_degree[i] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  const Eigen::MatrixXd laplacian =
      Eigen::MatrixXd::Identity(n, n) -
      inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) throw NumericError("Laplacian eigensolve failed");
  // Eigenvalues come back ascending.
  Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(k);
  for (Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0) embedding.row(i) /= norm;
  }
  Rng rng = make_rng(seed, Stream::kCluster);
  return kmeans(embedding, k, rng, 10);
}

ClusterResult spectral_cluster(const Eigen::MatrixXd& points, int k,
                               std::uint64_t seed) {
  const Index n = points.rows();
  if (k < 1 || n < k) throw InputError("spectral clustering needs at least k points");
  Eigen::MatrixXd dist(n, n);
  std::vector<double> pairwise;
  pairwise.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (points.row(i) - points.row(j)).norm();
      pairwise.push_back(dist(i, j));
    }
  }
  std::vector<double> positive;
  std::copy_if(pairwise.begin(), pairwise.end(), std::back_inserter(positive),
               [](double d) { return d > 0; });
  if (positive.empty()) {
    // Every point identical: one cluster, the rest empty.
    return {std::vector<int>(static_cast<std::size_t>(n), 0), k > 1};
  }
  auto median = [](std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
      m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
    }
    return m;
  };
  double bandwidth = median(pairwise);
  // More than half the pairs coincide: fall back to the non-zero distances.
  if (!(bandwidth > 0)) bandwidth = median(positive);
  Eigen::MatrixXd affinity = (-dist.array().square() / (2.0 * bandwidth * bandwidth)).exp();
  affinity.diagonal().setZero();
  return spectral_cluster_affinity(affinity, k, seed);
}

UnsupervisedResult attack_unsupervised(std::span<const WhiteBoxFeatures> features,
                                       std::uint64_t seed) {
  if (features.size() < 4) throw InputError("unsupervised attack needs at least 4 samples");
  const auto n = static_cast<Index>(features.size());
  std::vector<std::vector<double>> rows;
  for (const WhiteBoxFeatures& f : features) {
    std::vector<double> row;
    for (const auto& block : gradient_norms(f)) row.insert(row.end(), block.begin(), block.end());
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("samples carry different gradient geometry");
    }
    rows.push_back(std::move(row));
  }
  const auto dims = static_cast<Index>(rows.front().size());
  Eigen::MatrixXd points(n, dims);
  for (Index i = 0; i < n; ++i) {
    points.row(i) = Eigen::Map<const Eigen::RowVectorXd>(rows[static_cast<std::size_t>(i)].data(), dims);
  }
  // Final-layer norm of the latest snapshot decides which cluster is "member".
  const Eigen::VectorXd final_norm = points.col(dims - 1);
  const Eigen::MatrixXd standardized = Standardizer::fit(points).apply(points);

  ClusterResult clusters = spectral_cluster(standardized, 2, seed);
  UnsupervisedResult out;
  out.clusters = clusters.labels;
  out.degenerate = clusters.degenerate;
  double sum[2] = {0, 0};
  Index count[2] = {0, 0};
  for (Index i = 0; i < n; ++i) {
    const int c = clusters.labels[static_cast<std::size_t>(i)];
    sum[c] += final_norm[i];
    ++count[c];
  }
  if (count[1] == 0) {
    out.member_cluster = 0;
  } else {
    const double mean0 = sum[0] / static_cast<double>(count[0]);
    const double mean1 = sum[1] / static_cast<double>(count[1]);
    if (mean0 != mean1) {
      out.member_cluster = mean0 < mean1 ? 0 : 1;
    } else {
      // Equal means: the smaller cluster is "member"; equal sizes pick 0.
      out.member_cluster = count[1] < count[0] ? 1 : 0;
    }
  }
  out.membership.reserve(features.size());
  for (int c : clusters.labels) out.membership.push_back(c == out.member_cluster ? 1 : 0);
  return out;
}

}  // namespace mialab
