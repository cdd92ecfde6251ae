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

#include "mialab/report.hpp"

#include <cstdio>

#include "mialab/config.hpp"
#include "mialab/snapshot_io.hpp"

namespace mialab {

namespace {

using nlohmann::json;

constexpr const char* kReportFormat = "mialab.experiment_report";

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json to_json(const SummaryStat& s) {
  return {{"median", s.median}, {"min", s.min}, {"max", s.max}};
}

SummaryStat stat_from_json(const json& doc) {
  return {doc.at("median").get<double>(), doc.at("min").get<double>(),
          doc.at("max").get<double>()};
}

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::string out = kReportCsvHeader;
  out += '\n';
  const std::string scenario = to_string(report.spec.scenario);
  for (const ConditionResult& r : report.results) {
    out += scenario + ',' + r.condition + ',' + std::to_string(r.seed) + ',' +
           fixed6(r.metrics.accuracy) + ',' + fixed6(r.metrics.precision) + ',' +
           fixed6(r.metrics.recall) + ',' + fixed6(r.auc) + '\n';
  }
  return out;
}

json to_json(const ExperimentReport& report) {
  json results = json::array();
  for (const ConditionResult& r : report.results) {
    json roc = json::array();
    for (const RocPoint& p : r.roc) roc.push_back({p.fpr, p.tpr});
    results.push_back({{"condition", r.condition},
                       {"seed", r.seed},
                       {"accuracy", r.metrics.accuracy},
                       {"precision", r.metrics.precision},
                       {"recall", r.metrics.recall},
                       {"precision_undefined", r.metrics.precision_undefined},
                       {"recall_undefined", r.metrics.recall_undefined},
                       {"auc", r.auc},
                       {"roc", roc}});
  }
  json summaries = json::array();
  for (const ConditionSummary& s : report.summaries) {
    summaries.push_back({{"condition", s.condition},
                         {"accuracy", to_json(s.accuracy)},
                         {"precision", to_json(s.precision)},
                         {"recall", to_json(s.recall)},
                         {"auc", to_json(s.auc)}});
  }
  return {{"format", kReportFormat},
          {"spec", to_json(report.spec)},
          {"results", results},
          {"summaries", summaries},
          {"wall_clock_seconds", report.wall_clock_seconds}};
}

ExperimentReport report_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kReportFormat) {
      throw InputError("not an experiment report");
    }
    ExperimentReport report;
    report.spec = spec_from_json(doc.at("spec"));
    for (const json& r : doc.at("results")) {
      ConditionResult c;
      c.condition = r.at("condition").get<std::string>();
      c.seed = r.at("seed").get<std::uint64_t>();
      c.metrics.accuracy = r.at("accuracy").get<double>();
      c.metrics.precision = r.at("precision").get<double>();
      c.metrics.recall = r.at("recall").get<double>();
      c.metrics.precision_undefined = r.at("precision_undefined").get<bool>();
      c.metrics.recall_undefined = r.at("recall_undefined").get<bool>();
      c.auc = r.at("auc").get<double>();
      for (const json& p : r.at("roc")) {
        c.roc.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      report.results.push_back(std::move(c));
    }
    for (const json& s : doc.at("summaries")) {
      report.summaries.push_back({s.at("condition").get<std::string>(),
                                  stat_from_json(s.at("accuracy")),
                                  stat_from_json(s.at("precision")),
                                  stat_from_json(s.at("recall")),
                                  stat_from_json(s.at("auc"))});
    }
    report.wall_clock_seconds = doc.at("wall_clock_seconds").get<double>();
    return report;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

void emit_report(const ExperimentReport& report, const ReportPaths& paths) {
  write_text_file(paths.csv, report_csv(report));
  write_text_file(paths.json, to_json(report).dump(2) + "\n");
}

ExperimentReport load_report(const std::filesystem::path& json_path) {
  return report_from_json(read_json_file(json_path));
}

}  // namespace mialab
