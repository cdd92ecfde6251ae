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

#include <random>

#include "mialab/metrics.hpp"
#include "mialab/rng.hpp"
#include "oracles.hpp"

namespace mialab {
namespace {

TEST(RocTest, PerfectSeparationGivesOne) {
  const std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  const std::vector<int> y = {1, 1, 0, 0};
  EXPECT_EQ(roc_auc(s, y).auc, 1.0);
}

TEST(RocTest, AllEqualScoresGiveHalf) {
  const std::vector<double> s(6, 0.4);
  const std::vector<int> y = {1, 0, 1, 0, 0, 1};
  const RocCurve c = roc_auc(s, y);
  EXPECT_EQ(c.auc, 0.5);
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points.front(), (RocPoint{0.0, 0.0}));
  EXPECT_EQ(c.points.back(), (RocPoint{1.0, 1.0}));
}

TEST(RocTest, MatchesPairwiseOracle) {
  Rng rng = make_rng({1});
  std::uniform_int_distribution<int> size(2, 100);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = size(rng);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      // Coarse scores force ties.
      s.push_back(trial % 2 ? coarse(rng) / 10.0 : std::generate_canonical<double, 53>(rng));
      y.push_back(coin(rng) ? 1 : 0);
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(roc_auc(s, y).auc, oracle::pairwise_auc(s, y), 1e-12) << "trial " << trial;
  }
}

TEST(RocTest, CurveIsMonotoneFromOriginToOne) {
  Rng rng = make_rng({2});
  std::vector<double> s;
  std::vector<int> y;
  for (int i = 0; i < 50; ++i) {
    s.push_back(std::generate_canonical<double, 53>(rng));
    y.push_back(i % 3 == 0 ? 1 : 0);
  }
  const RocCurve c = roc_auc(s, y);
  EXPECT_EQ(c.points.front(), (RocPoint{0.0, 0.0}));
  EXPECT_EQ(c.points.back(), (RocPoint{1.0, 1.0}));
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_GE(c.points[i].fpr, c.points[i - 1].fpr);
    EXPECT_GE(c.points[i].tpr, c.points[i - 1].tpr);
  }
  EXPECT_GE(c.auc, 0.0);
  EXPECT_LE(c.auc, 1.0);
}

TEST(RocTest, ReversedScoresComplementAuc) {
  Rng rng = make_rng({3});
  std::vector<double> s, neg;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    s.push_back(std::generate_canonical<double, 53>(rng));
    neg.push_back(-s.back());
    y.push_back(i % 2);
  }
  EXPECT_NEAR(roc_auc(neg, y).auc, 1.0 - roc_auc(s, y).auc, 1e-12);
}

TEST(RocTest, RejectsSingleClassAndMismatch) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(roc_auc(s, std::vector<int>{1, 1}), InputError);
  EXPECT_THROW(roc_auc(s, std::vector<int>{1}), InputError);
}

TEST(ClassificationMetricsTest, AllCorrect) {
  const std::vector<int> y = {1, 0, 1, 0};
  const ClassificationMetrics m = classification_metrics(y, y);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
}

TEST(ClassificationMetricsTest, AllMemberOnHalfMembers) {
  const std::vector<int> p = {1, 1, 1, 1};
  const std::vector<int> y = {1, 0, 1, 0};
  const ClassificationMetrics m = classification_metrics(p, y);
  EXPECT_EQ(m.accuracy, 0.5);
  EXPECT_EQ(m.precision, 0.5);
  EXPECT_EQ(m.recall, 1.0);
}

TEST(ClassificationMetricsTest, ZeroDenominatorsAreFlagged) {
  const std::vector<int> p = {0, 0};
  const std::vector<int> y = {0, 0};
  const ClassificationMetrics m = classification_metrics(p, y);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_TRUE(m.precision_undefined);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_TRUE(m.recall_undefined);
  EXPECT_EQ(m.accuracy, 1.0);
}

TEST(ClassificationMetricsTest, RandomGuessingIsChance) {
  Rng rng = make_rng({4});
  std::bernoulli_distribution coin(0.5);
  std::vector<int> p, y;
  for (int i = 0; i < 1000; ++i) {
    p.push_back(coin(rng));
    y.push_back(coin(rng));
  }
  EXPECT_NEAR(classification_metrics(p, y).accuracy, 0.5, 0.05);
}

TEST(ClassificationMetricsTest, RejectsEmptyAndMismatch) {
  EXPECT_THROW(classification_metrics(std::vector<int>{}, std::vector<int>{}), InputError);
  EXPECT_THROW(classification_metrics(std::vector<int>{1}, std::vector<int>{1, 0}), InputError);
}

}  // namespace
}  // namespace mialab
