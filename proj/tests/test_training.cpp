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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "mialab/training.hpp"

namespace mialab {
namespace {

Architecture toy_arch() {
  const std::vector<Index> hidden = {64, 64};
  return make_mlp(8, hidden, 4, true);
}

TEST(SyntheticDataTest, ShapesAndBalance) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 50, 1.0, 1, 10);
  EXPECT_EQ(d.members.size(), 200);
  EXPECT_EQ(d.nonmembers.size(), 200);
  EXPECT_EQ(d.finetune.size(), 40);
  EXPECT_EQ(d.members.dim(), 8);
  for (const LabeledSet* s : {&d.members, &d.nonmembers, &d.finetune}) {
    std::vector<int> counts(4, 0);
    for (int y : s->y) ++counts[static_cast<std::size_t>(y)];
    EXPECT_EQ(counts[0], counts[3]);
    EXPECT_EQ(counts[1], counts[2]);
    EXPECT_EQ(counts[0], counts[1]);
  }
}

TEST(SyntheticDataTest, NoSampleSharedBetweenSets) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 50, 1.0, 2, 20);
  std::set<std::vector<double>> rows;
  for (const LabeledSet* s : {&d.members, &d.nonmembers, &d.finetune}) {
    for (Index r = 0; r < s->size(); ++r) {
      const Eigen::VectorXd v = s->sample(r);
      EXPECT_TRUE(rows.insert(std::vector<double>(v.data(), v.data() + v.size())).second);
    }
  }
}

TEST(SyntheticDataTest, ClassMeansAreSeparated) {
  const DatasetSplit d = make_synthetic_dataset(3, 4, 4000, 3.0, 3);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(3, 4);
  for (Index r = 0; r < d.members.size(); ++r) {
    means.row(d.members.y[static_cast<std::size_t>(r)]) += d.members.x.row(r);
  }
  means /= 4000.0;
  EXPECT_NEAR((means.row(0) - means.row(1)).norm(), 3.0, 0.15);
  EXPECT_NEAR((means.row(1) - means.row(2)).norm(), 3.0, 0.15);
}

TEST(SyntheticDataTest, DeterministicPerSeed) {
  EXPECT_EQ(make_synthetic_dataset(4, 8, 5, 1.0, 9).members,
            make_synthetic_dataset(4, 8, 5, 1.0, 9).members);
  EXPECT_FALSE(make_synthetic_dataset(4, 8, 5, 1.0, 9).members ==
               make_synthetic_dataset(4, 8, 5, 1.0, 10).members);
}

TEST(SyntheticDataTest, RejectsBadSizes) {
  EXPECT_THROW(make_synthetic_dataset(1, 8, 5, 1.0, 0), InputError);
  EXPECT_THROW(make_synthetic_dataset(9, 8, 5, 1.0, 0), InputError);
  EXPECT_THROW(make_synthetic_dataset(4, 8, 0, 1.0, 0), InputError);
}

TEST(LabeledSetTest, SubsetAndConcat) {
  const LabeledSet s = make_synthetic_dataset(2, 3, 3, 1.0, 4).members;
  const std::vector<Index> rows = {4, 0};
  const LabeledSet sub = s.subset(rows);
  ASSERT_EQ(sub.size(), 2);
  EXPECT_EQ(sub.x.row(0), s.x.row(4));
  EXPECT_EQ(sub.y[1], s.y[0]);
  const LabeledSet both = LabeledSet::concat(sub, s);
  EXPECT_EQ(both.size(), 8);
  EXPECT_EQ(both.x.row(2), s.x.row(0));
}

TEST(LabeledSetTest, CsvRoundTripIsExact) {
  const LabeledSet s = make_synthetic_dataset(4, 8, 6, 1.5, 5).members;
  const auto path = std::filesystem::temp_directory_path() / "mialab_training_test" / "d.csv";
  write_labeled_set_csv(s, path);
  EXPECT_EQ(read_labeled_set_csv(path), s);
  std::filesystem::remove_all(path.parent_path());
}

TEST(LabeledSetTest, CsvRejectsMalformedRows) {
  const auto path = std::filesystem::temp_directory_path() / "mialab_bad.csv";
  {
    std::ofstream out(path);
    out << "x0,x1,label\n1.0,abc,0\n";
  }
  EXPECT_THROW(read_labeled_set_csv(path), InputError);
  {
    std::ofstream out(path);
    out << "x0,x1,label\n1.0,2.0\n";
  }
  EXPECT_THROW(read_labeled_set_csv(path), InputError);
  std::filesystem::remove(path);
}

TEST(TrainingConfigTest, Validation) {
  TrainingConfig cfg;
  cfg.epochs = 10;
  cfg.snapshot_epochs = {2, 5, 10};
  EXPECT_NO_THROW(cfg.validate());
  cfg.snapshot_epochs = {5, 2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.snapshot_epochs = {11};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.snapshot_epochs = {};
  cfg.lr = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.lr = 0.1;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(TrainCentralizedTest, OverfitsToyTarget) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 50, 1.0, 1);
  TrainingConfig cfg;
  cfg.epochs = 300;
  cfg.seed = 1;
  const TrainingResult r = train_centralized(toy_arch(), d, cfg);
  EXPECT_GE(r.train_accuracy, 0.99);
  EXPECT_DOUBLE_EQ(r.train_accuracy, accuracy(r.final_model, d.members));
  EXPECT_LT(accuracy(r.final_model, d.nonmembers), r.train_accuracy);
  EXPECT_LT(mean_loss(r.final_model, d.members), mean_loss(r.final_model, d.nonmembers));
  EXPECT_EQ(r.final_model.tag(), 300);
}

TEST(TrainCentralizedTest, SnapshotsAtRequestedEpochs) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 10, 1.0, 2);
  TrainingConfig cfg;
  cfg.epochs = 6;
  cfg.snapshot_epochs = {1, 4, 6};
  const TrainingResult r = train_centralized(toy_arch(), d, cfg);
  ASSERT_EQ(r.snapshots.size(), 3u);
  EXPECT_EQ(r.snapshots[0].tag(), 1);
  EXPECT_EQ(r.snapshots[1].tag(), 4);
  EXPECT_EQ(r.snapshots[2], r.final_model);

  TrainingConfig shorter = cfg;
  shorter.epochs = 4;
  shorter.snapshot_epochs = {};
  EXPECT_EQ(train_centralized(toy_arch(), d, shorter).final_model, r.snapshots[1]);
}

TEST(TrainCentralizedTest, ZeroEpochsGivesInitialisedModel) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 10, 1.0, 3);
  TrainingConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 7;
  Rng rng = make_rng(7, Stream::kInit);
  EXPECT_EQ(train_centralized(toy_arch(), d, cfg).final_model,
            ModelSnapshot::initialized(toy_arch(), rng));
}

TEST(TrainCentralizedTest, DeterministicAndSeedSensitive) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 10, 1.0, 4);
  TrainingConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 11;
  const ModelSnapshot a = train_centralized(toy_arch(), d, cfg).final_model;
  EXPECT_EQ(a, train_centralized(toy_arch(), d, cfg).final_model);
  cfg.seed = 12;
  EXPECT_FALSE(a == train_centralized(toy_arch(), d, cfg).final_model);
}

TEST(TrainCentralizedTest, MembersOnly) {
  DatasetSplit d = make_synthetic_dataset(4, 8, 10, 1.0, 5);
  TrainingConfig cfg;
  cfg.epochs = 3;
  const ModelSnapshot a = train_centralized(toy_arch(), d, cfg).final_model;
  d.nonmembers = make_synthetic_dataset(4, 8, 10, 1.0, 99).nonmembers;
  EXPECT_EQ(a, train_centralized(toy_arch(), d, cfg).final_model);
}

TEST(FineTuneTest, MovesTowardFineTuneSet) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 50, 1.0, 6, 50);
  TrainingConfig cfg;
  cfg.epochs = 100;
  const TrainingResult base = train_centralized(toy_arch(), d, cfg);
  cfg.epochs = 50;
  const ModelSnapshot tuned = fine_tune(base.final_model, d.finetune, cfg);
  EXPECT_EQ(tuned.tag(), 150);
  EXPECT_LT(mean_loss(tuned, d.finetune), mean_loss(base.final_model, d.finetune));
  EXPECT_THROW(fine_tune(base.final_model, LabeledSet{}, cfg), InputError);
}

TEST(TrainCentralizedTest, DivergenceIsNumericError) {
  const DatasetSplit d = make_synthetic_dataset(4, 8, 10, 50.0, 7);
  TrainingConfig cfg;
  cfg.epochs = 50;
  cfg.lr = 1e6;
  EXPECT_THROW(train_centralized(toy_arch(), d, cfg), NumericError);
}

}  // namespace
}  // namespace mialab
