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

#ifndef MIALAB_METRICS_HPP_
#define MIALAB_METRICS_HPP_

#include <span>
#include <vector>

namespace mialab {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  // Step curve from (0, 0) to (1, 1), one point per distinct score.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Sweeps thresholds over the distinct scores (members = label 1 are the
// positive class); AUC by the trapezoid rule, so tied scores count half.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  // Zero denominators are reported as 0 with these flags set.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

ClassificationMetrics classification_metrics(std::span<const int> predicted,
                                             std::span<const int> labels);

}  // namespace mialab

#endif  // MIALAB_METRICS_HPP_
