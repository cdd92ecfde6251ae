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

// Membership inference attacks.
//
// The supervised attack feeds every feature segment through its own fully
// connected submodule, concatenates the submodule outputs, and maps them
// through a fully connected encoder to one logistic membership score.
// The unsupervised attack clusters per-layer gradient norms spectrally and
// calls the cluster with the lower final-layer gradient norm "member".

#ifndef MIALAB_ATTACK_HPP_
#define MIALAB_ATTACK_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mialab/features.hpp"
#include "mialab/nn.hpp"
#include "mialab/rng.hpp"

namespace mialab {

struct AttackNetSpec {
  std::vector<Index> segment_sizes;
  std::vector<Index> submodule_hidden{64, 64};
  std::vector<Index> encoder_hidden{64, 64};

  static AttackNetSpec for_geometry(const FeatureGeometry& geometry,
                                    std::vector<Index> submodule_hidden = {64, 64},
                                    std::vector<Index> encoder_hidden = {64, 64});
  void validate() const;
  Index input_size() const;
};

class AttackNet {
 public:
  AttackNet(const AttackNetSpec& spec, Rng& rng);
  AttackNet(std::vector<Index> segment_sizes, std::vector<ModelSnapshot> submodules,
            ModelSnapshot encoder);

  // Pre-sigmoid scores, one per row of `x`.
  Eigen::VectorXd logits(const Eigen::MatrixXd& x) const;

  struct LossAndGradient {
    double loss = 0.0;
    // Submodule parameters in segment order, then the encoder's.
    std::vector<Params> gradients;
  };
  // Mean binary cross-entropy against targets in {0, 1}.
  LossAndGradient loss_gradient(const Eigen::MatrixXd& x,
                                std::span<const double> targets) const;

  std::vector<Params> params() const;
  AttackNet with_params(const std::vector<Params>& params) const;

  const std::vector<Index>& segment_sizes() const { return segment_sizes_; }
  const std::vector<ModelSnapshot>& submodules() const { return submodules_; }
  const ModelSnapshot& encoder() const { return encoder_; }

  friend bool operator==(const AttackNet&, const AttackNet&) = default;

 private:
  std::vector<Index> segment_sizes_;
  std::vector<Index> segment_offsets_;
  std::vector<ModelSnapshot> submodules_;
  ModelSnapshot encoder_;
};

// Per-dimension standardisation fitted on attacker-known data only.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& rows);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;

  friend bool operator==(const Standardizer& a, const Standardizer& b) {
    return a.mean.size() == b.mean.size() && (a.mean.array() == b.mean.array()).all() &&
           (a.scale.array() == b.scale.array()).all();
  }
};

struct AttackTrainConfig {
  int epochs = 60;
  int batch_size = 32;
  double lr = 0.05;
  std::uint64_t seed = 0;
  // Share of attacker-known members (and as many non-members) used for
  // training; the remainder is held out for evaluation.
  double train_fraction = 0.5;

  void validate() const;
  friend bool operator==(const AttackTrainConfig&, const AttackTrainConfig&) = default;
};

struct AttackModel {
  AttackNet net;
  Standardizer standardizer;
  FeatureGeometry geometry;
};

struct MembershipPrediction {
  double score = 0.0;
  // score >= 0.5; a tie counts as member.
  bool member = false;
};

double sigmoid(double z);

// Trains on rows of `features` (raw, unstandardised) with membership bits.
AttackModel train_supervised_attack(const Eigen::MatrixXd& features,
                                    std::span<const int> membership,
                                    const FeatureGeometry& geometry,
                                    const AttackNetSpec& spec,
                                    const AttackTrainConfig& cfg);

struct LabeledFeatures {
  WhiteBoxFeatures features;
  int member = 0;
};

AttackModel train_supervised_attack(std::span<const LabeledFeatures> labeled,
                                    const FeatureConfig& feature_cfg,
                                    const AttackTrainConfig& cfg,
                                    std::vector<Index> submodule_hidden = {64, 64},
                                    std::vector<Index> encoder_hidden = {64, 64});

MembershipPrediction predict_membership(const AttackModel& model,
                                        const WhiteBoxFeatures& features,
                                        const FeatureConfig& feature_cfg);

// Scores raw feature rows one at a time, so a row's score never depends
// on the rest of the batch.
std::vector<double> membership_scores(const AttackModel& model,
                                      const Eigen::MatrixXd& raw_features);

// ModelSnapshot documents for the network plus a standardisation sidecar.
void save_attack_model(const AttackModel& model, const std::filesystem::path& path);
AttackModel load_attack_model(const std::filesystem::path& path);

struct ClusterResult {
  std::vector<int> labels;
  // Set when fewer than k non-empty clusters exist (e.g. identical points).
  bool degenerate = false;
};

// Normalised spectral clustering of the rows of `points`: RBF affinity
// with bandwidth equal to the median pairwise distance, symmetric
// normalised Laplacian, k lowest eigenvectors, row normalisation, then
// seeded k-means with 10 restarts.
ClusterResult spectral_cluster(const Eigen::MatrixXd& points, int k,
                               std::uint64_t seed);

// Same pipeline from a precomputed symmetric non-negative affinity matrix.
ClusterResult spectral_cluster_affinity(const Eigen::MatrixXd& affinity, int k,
                                        std::uint64_t seed);

// Lloyd's algorithm with k-means++ seeding; best inertia over restarts.
ClusterResult kmeans(const Eigen::MatrixXd& rows, int k, Rng& rng, int restarts);

struct UnsupervisedResult {
  // 1 = predicted member.
  std::vector<int> membership;
  std::vector<int> clusters;
  int member_cluster = 0;
  bool degenerate = false;
};

UnsupervisedResult attack_unsupervised(std::span<const WhiteBoxFeatures> features,
                                       std::uint64_t seed);

}  // namespace mialab

#endif  // MIALAB_ATTACK_HPP_
