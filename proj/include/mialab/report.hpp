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

#ifndef MIALAB_REPORT_HPP_
#define MIALAB_REPORT_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mialab/experiment.hpp"

namespace mialab {

inline constexpr const char* kReportCsvHeader =
    "scenario,condition,seed,accuracy,precision,recall,auc";

// One row per result in report order, six decimals.
std::string report_csv(const ExperimentReport& report);

// Full report including the spec, ROC points and summaries.
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

struct ReportPaths {
  std::filesystem::path csv;
  std::filesystem::path json;

  static ReportPaths in_dir(const std::filesystem::path& dir) {
    return {dir / "report.csv", dir / "report.json"};
  }
};

void emit_report(const ExperimentReport& report, const ReportPaths& paths);
ExperimentReport load_report(const std::filesystem::path& json_path);

}  // namespace mialab

#endif  // MIALAB_REPORT_HPP_
