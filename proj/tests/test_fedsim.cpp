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

#include "mialab/fedsim.hpp"
#include "oracles.hpp"

namespace mialab {
namespace {

Architecture fl_arch() {
  const std::vector<Index> hidden = {16};
  return make_mlp(6, hidden, 3, true);
}

std::vector<DatasetSplit> participants(int n, std::uint64_t seed) {
  const DatasetSplit pool = make_synthetic_dataset(3, 6, 10 * n, 1.0, seed);
  std::vector<DatasetSplit> out;
  for (int p = 0; p < n; ++p) {
    std::vector<Index> rows;
    for (Index i = 0; i < 30; ++i) rows.push_back(30 * p + i);
    DatasetSplit d;
    d.num_classes = 3;
    d.members = pool.members.subset(rows);
    out.push_back(std::move(d));
  }
  return out;
}

FLConfig small_config() {
  FLConfig cfg;
  cfg.num_participants = 3;
  cfg.rounds = 6;
  cfg.local_epochs = 2;
  cfg.batch_size = 8;
  cfg.lr = 0.1;
  cfg.seed = 5;
  cfg.observation_rounds = {2, 4, 5};
  return cfg;
}

TEST(FedAvgTest, MatchesElementwiseMean) {
  Rng rng = make_rng({1});
  std::vector<Params> uploads;
  for (int i = 0; i < 5; ++i) uploads.push_back(initialize_params<double>(fl_arch(), rng));
  const Params avg = fedavg(uploads);
  const Params expected = oracle::mean(uploads);
  for (std::size_t t = 0; t < avg.size(); ++t) {
    EXPECT_LE((avg[t].data() - expected[t].data()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(FedAvgTest, IdenticalUploadsAreFixedPoint) {
  Rng rng = make_rng({2});
  const Params p = initialize_params<double>(fl_arch(), rng);
  const std::vector<Params> uploads(4, p);
  const Params avg = fedavg(uploads);
  for (std::size_t t = 0; t < p.size(); ++t) {
    EXPECT_LE((avg[t].data() - p[t].data()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(FedAvgTest, RejectsEmptyAndIncongruent) {
  EXPECT_THROW(fedavg(std::vector<Params>{}), InputError);
  Rng rng = make_rng({3});
  std::vector<Params> uploads = {initialize_params<double>(fl_arch(), rng)};
  uploads.push_back(uploads[0]);
  uploads[1].pop_back();
  EXPECT_THROW(fedavg(uploads), InputError);
}

TEST(FlRunTest, GlobalIsMeanOfUploadsEveryRound) {
  const auto parts = participants(3, 1);
  const RoundLog log = fl_run(fl_arch(), parts, small_config(), AttackerPlacement::none());
  ASSERT_EQ(log.size(), 6);
  for (const RoundRecord& r : log.rounds()) {
    ASSERT_EQ(r.uploads.size(), 3u);
    std::vector<Params> ups;
    for (const auto& u : r.uploads) ups.push_back(u.params());
    const Params expected = oracle::mean(ups);
    for (std::size_t t = 0; t < expected.size(); ++t) {
      EXPECT_LE((r.global.params()[t].data() - expected[t].data()).cwiseAbs().maxCoeff(),
                1e-15);
    }
    EXPECT_TRUE(r.interventions.empty());
  }
  for (int r = 2; r <= 6; ++r) EXPECT_EQ(log.at(r).distributed, log.at(r - 1).global);
}

TEST(FlRunTest, SerialAndParallelAreBitIdentical) {
  const auto parts = participants(3, 2);
  FLConfig cfg = small_config();
  const RoundLog serial = fl_run(fl_arch(), parts, cfg, AttackerPlacement::global_passive());
  cfg.parallel = true;
  EXPECT_EQ(fl_run(fl_arch(), parts, cfg, AttackerPlacement::global_passive()), serial);
}

TEST(FlRunTest, PassivePlacementsDoNotPerturbTraining) {
  const auto parts = participants(3, 3);
  const FLConfig cfg = small_config();
  const RoundLog none = fl_run(fl_arch(), parts, cfg, AttackerPlacement::none());
  EXPECT_EQ(fl_run(fl_arch(), parts, cfg, AttackerPlacement::global_passive()), none);
  EXPECT_EQ(fl_run(fl_arch(), parts, cfg, AttackerPlacement::local_passive(1)), none);
}

TEST(FlRunTest, ParticipantSeedsOverrideDerivedStreams) {
  const auto parts = participants(3, 4);
  FLConfig cfg = small_config();
  const RoundLog derived = fl_run(fl_arch(), parts, cfg, AttackerPlacement::none());
  cfg.participant_seeds = {7, 8, 9};
  const RoundLog explicit_seeds = fl_run(fl_arch(), parts, cfg, AttackerPlacement::none());
  EXPECT_FALSE(explicit_seeds == derived);
  EXPECT_EQ(fl_run(fl_arch(), parts, cfg, AttackerPlacement::none()), explicit_seeds);
  cfg.participant_seeds = {1};
  EXPECT_THROW(fl_run(fl_arch(), parts, cfg, AttackerPlacement::none()), ConfigError);
}

TEST(FlRunTest, ActiveAttackIntervenesOnlyInObservationWindow) {
  const auto parts = participants(3, 5);
  const FLConfig cfg = small_config();
  const AttackerPlacement active =
      AttackerPlacement::global_active(0.5, parts[0].members, false, 0);
  const RoundLog log = fl_run(fl_arch(), parts, cfg, active);
  for (const RoundRecord& r : log.rounds()) {
    const bool in_window = r.round >= 2 && r.round <= 5;
    EXPECT_EQ(r.victim_received.has_value(), in_window) << "round " << r.round;
    EXPECT_EQ(r.interventions.size(), in_window ? 1u : 0u);
    if (in_window) {
      // Ascent raises the target loss over what the victim would have got.
      EXPECT_GT(mean_loss(*r.victim_received, parts[0].members),
                mean_loss(r.distributed, parts[0].members));
    }
  }
  const RoundLog passive = fl_run(fl_arch(), parts, cfg, AttackerPlacement::global_passive());
  EXPECT_EQ(log.at(1), passive.at(1));
  EXPECT_FALSE(log.at(2).global == passive.at(2).global);
}

TEST(FlRunTest, IsolationExcludesVictimFromAverage) {
  const auto parts = participants(3, 6);
  const FLConfig cfg = small_config();
  const AttackerPlacement isolate =
      AttackerPlacement::global_active(0.5, parts[1].members, true, 1);
  const RoundLog log = fl_run(fl_arch(), parts, cfg, isolate);
  for (int round = 2; round <= 5; ++round) {
    const RoundRecord& r = log.at(round);
    std::vector<Params> others = {r.uploads[0].params(), r.uploads[2].params()};
    EXPECT_EQ(r.global.params(), fedavg(others)) << "round " << round;
    ASSERT_EQ(r.interventions.size(), 2u);
    EXPECT_EQ(r.interventions[0].kind, Intervention::Kind::kIsolation);
    // The victim keeps training from its own previous upload.
    const ForwardTrace trace = forward(log.at(round - 1).uploads[1],
                                       parts[1].members.x,
                                       std::span<const int>(parts[1].members.y));
    const Params ascended = ascent_step(log.at(round - 1).uploads[1].params(),
                                        loss_gradient(log.at(round - 1).uploads[1], trace), 0.5);
    EXPECT_EQ(r.victim_received->params(), ascended);
  }
  std::vector<Params> all;
  for (const auto& u : log.at(6).uploads) all.push_back(u.params());
  EXPECT_EQ(log.at(6).global.params(), fedavg(all));
}

TEST(FlRunTest, ValidatesInputs) {
  auto parts = participants(3, 7);
  FLConfig cfg = small_config();
  EXPECT_THROW(fl_run(fl_arch(), std::span(parts).first(2), cfg, AttackerPlacement::none()),
               ConfigError);
  cfg.observation_rounds = {4, 2};
  EXPECT_THROW(fl_run(fl_arch(), parts, cfg, AttackerPlacement::none()), ConfigError);
  cfg = small_config();
  cfg.num_participants = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  EXPECT_THROW(fl_run(fl_arch(), parts, cfg, AttackerPlacement::local_passive(3)), ConfigError);
  EXPECT_THROW(fl_run(fl_arch(), parts, cfg,
                      AttackerPlacement::global_active(0.1, LabeledSet{}, false)),
               ConfigError);
}

TEST(ObserveTest, GlobalSeesUploadsLocalSeesDistributed) {
  const auto parts = participants(3, 8);
  const FLConfig cfg = small_config();
  const RoundLog log = fl_run(fl_arch(), parts, cfg, AttackerPlacement::global_passive());
  const std::vector<int> rounds = {2, 5};
  const auto global = observe(log, AttackerPlacement::global_passive(), rounds);
  ASSERT_EQ(global.size(), 2u);
  ASSERT_EQ(global[0].size(), 3u);
  EXPECT_EQ(global[1][2].params(), log.at(5).uploads[2].params());
  EXPECT_EQ(global[1][2].tag(), 5);

  const auto local = observe(log, AttackerPlacement::local_passive(1), rounds);
  ASSERT_EQ(local[0].size(), 1u);
  EXPECT_EQ(local[0][0].params(), log.at(2).distributed.params());
  EXPECT_EQ(local[0][0].tag(), 2);

  const SnapshotSeries victim = participant_view(global, AttackerPlacement::global_passive(), 0);
  ASSERT_EQ(victim.size(), 2u);
  EXPECT_EQ(victim[0].params(), log.at(2).uploads[0].params());
  EXPECT_THROW(observe(log, AttackerPlacement::none(), rounds), InputError);
  const std::vector<int> beyond = {7};
  EXPECT_THROW(observe(log, AttackerPlacement::global_passive(), beyond), InputError);
}

TEST(RoundLogTest, AppendOnlyInRoundOrder) {
  RoundLog log;
  Rng rng = make_rng({9});
  const ModelSnapshot m = ModelSnapshot::initialized(fl_arch(), rng);
  EXPECT_THROW(log.append(RoundRecord{2, m, {m}, m, {}, std::nullopt}), InputError);
  log.append(RoundRecord{1, m, {m}, m, {}, std::nullopt});
  EXPECT_EQ(log.size(), 1);
}

TEST(RoundLogTest, SaveLoadRoundTrip) {
  const auto parts = participants(3, 10);
  const FLConfig cfg = small_config();
  const RoundLog log = fl_run(fl_arch(), parts, cfg,
                              AttackerPlacement::global_active(0.2, parts[0].members, true));
  const auto dir = std::filesystem::temp_directory_path() / "mialab_roundlog_test";
  std::filesystem::remove_all(dir);
  save_round_log(log, dir);
  EXPECT_EQ(load_round_log(dir), log);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mialab
