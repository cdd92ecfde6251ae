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

#include "mialab/fedsim.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

#include "mialab/snapshot_io.hpp"

namespace mialab {

using nlohmann::json;

void FLConfig::validate() const {
  if (num_participants < 2) throw ConfigError("need at least 2 participants");
  if (rounds < 1) throw ConfigError("rounds must be positive");
  if (local_epochs < 1) throw ConfigError("local_epochs must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!std::is_sorted(observation_rounds.begin(), observation_rounds.end()) ||
      std::adjacent_find(observation_rounds.begin(), observation_rounds.end()) !=
          observation_rounds.end()) {
    throw ConfigError("observation_rounds must be strictly increasing");
  }
  for (int r : observation_rounds) {
    if (r < 1 || r > rounds) {
      throw ConfigError("observation round " + std::to_string(r) +
                        " outside [1, " + std::to_string(rounds) + "]");
    }
  }
  if (!participant_seeds.empty() &&
      participant_seeds.size() != static_cast<std::size_t>(num_participants)) {
    throw ConfigError("participant_seeds must list one seed per participant");
  }
}

std::string to_string(PlacementMode mode) {
  switch (mode) {
    case PlacementMode::kNone:
      return "none";
    case PlacementMode::kGlobalPassive:
      return "global_passive";
    case PlacementMode::kGlobalActive:
      return "global_active";
    case PlacementMode::kLocalPassive:
      return "local_passive";
  }
  return "unknown";
}

std::string to_string(Intervention::Kind kind) {
  return kind == Intervention::Kind::kAscent ? "ascent" : "isolation";
}

void AttackerPlacement::validate(int num_participants) const {
  if (mode == PlacementMode::kGlobalActive) {
    if (target_samples.empty()) {
      throw ConfigError("active attack needs target samples");
    }
    if (!(gamma > 0.0)) throw ConfigError("active attack needs gamma > 0");
    if (victim < 0 || victim >= num_participants) {
      throw ConfigError("victim participant out of range");
    }
  }
  if (mode == PlacementMode::kLocalPassive &&
      (observer < 0 || observer >= num_participants)) {
    throw ConfigError("observer participant out of range");
  }
}

void RoundLog::append(RoundRecord record) {
  if (record.round != size() + 1) {
    throw InputError("round log is append-only; expected round " +
                     std::to_string(size() + 1));
  }
  records_.push_back(std::move(record));
}

const RoundRecord& RoundLog::at(int round) const {
  if (round < 1 || round > size()) {
    throw InputError("round " + std::to_string(round) + " not in log");
  }
  return records_[static_cast<std::size_t>(round - 1)];
}

Params fedavg(std::span<const Params> uploads) {
  if (uploads.empty()) throw InputError("fedavg of zero uploads");
  Params sum = uploads.front();
  for (std::size_t i = 1; i < uploads.size(); ++i) {
    require_congruent(sum, uploads[i], "fedavg");
    for (std::size_t t = 0; t < sum.size(); ++t) sum[t].data() += uploads[i][t].data();
  }
  const double n = static_cast<double>(uploads.size());
  for (auto& t : sum) t.data() /= n;
  return sum;
}

namespace {

Rng participant_rng(const FLConfig& cfg, int participant, int round) {
  if (!cfg.participant_seeds.empty()) {
    return make_rng({cfg.participant_seeds[participant],
                     static_cast<std::uint64_t>(Stream::kParticipant),
                     static_cast<std::uint64_t>(round)});
  }
  return make_rng({cfg.seed, static_cast<std::uint64_t>(Stream::kParticipant),
                   static_cast<std::uint64_t>(participant),
                   static_cast<std::uint64_t>(round)});
}

}  // namespace

RoundLog fl_run(const Architecture& arch,
                std::span<const DatasetSplit> participant_datasets,
                const FLConfig& cfg, const AttackerPlacement& placement) {
  cfg.validate();
  placement.validate(cfg.num_participants);
  if (participant_datasets.size() != static_cast<std::size_t>(cfg.num_participants)) {
    throw ConfigError("expected one dataset per participant");
  }
  for (const DatasetSplit& d : participant_datasets) {
    if (d.members.empty()) throw InputError("participant with empty member set");
  }

  const bool active = placement.mode == PlacementMode::kGlobalActive;
  const int window_lo = cfg.observation_rounds.empty() ? 0 : cfg.observation_rounds.front();
  const int window_hi = cfg.observation_rounds.empty() ? -1 : cfg.observation_rounds.back();
  const int victim = placement.victim;

  Rng init_rng = make_rng(cfg.seed, Stream::kInit);
  ModelSnapshot global = ModelSnapshot::initialized(arch, init_rng, 0);
  std::optional<ModelSnapshot> victim_last_upload;

  RoundLog log;
  const auto n = static_cast<std::size_t>(cfg.num_participants);
  for (int round = 1; round <= cfg.rounds; ++round) {
    const bool intervene = active && round >= window_lo && round <= window_hi;
    std::vector<ModelSnapshot> received(n, global);
    std::vector<Intervention> interventions;
    std::optional<ModelSnapshot> victim_received;

    if (intervene) {
      ModelSnapshot base = global;
      if (placement.isolate && victim_last_upload) {
        base = *victim_last_upload;
        interventions.push_back({Intervention::Kind::kIsolation, victim});
      }
      const ForwardTrace trace =
          forward(base, placement.target_samples.x,
                  std::span<const int>(placement.target_samples.y));
      received[victim] = base.with_params(
          ascent_step(base.params(), loss_gradient(base, trace), placement.gamma));
      interventions.push_back({Intervention::Kind::kAscent, victim});
      victim_received = received[victim];
    }

    auto train = [&](std::size_t p) {
      Rng rng = participant_rng(cfg, static_cast<int>(p), round);
      return run_sgd_epochs(received[p].with_tag(round - 1),
                            participant_datasets[p].members, cfg.local_epochs,
                            cfg.batch_size, cfg.lr, rng)
          .with_tag(round);
    };
    std::vector<ModelSnapshot> uploads;
    uploads.reserve(n);
    if (cfg.parallel) {
      std::vector<std::future<ModelSnapshot>> jobs;
      jobs.reserve(n);
      for (std::size_t p = 0; p < n; ++p) {
        jobs.push_back(std::async(std::launch::async, train, p));
      }
      // The barrier collects results in participant order.
      for (auto& job : jobs) uploads.push_back(job.get());
    } else {
      for (std::size_t p = 0; p < n; ++p) uploads.push_back(train(p));
    }

    std::vector<Params> contributing;
    for (std::size_t p = 0; p < n; ++p) {
      if (intervene && placement.isolate && static_cast<int>(p) == victim) continue;
      contributing.push_back(uploads[p].params());
    }
    ModelSnapshot distributed = global;
    global = global.with_params(fedavg(contributing)).with_tag(round);
    if (active) victim_last_upload = uploads[static_cast<std::size_t>(victim)];

    log.append(RoundRecord{round, std::move(distributed), std::move(uploads),
                           global, std::move(interventions),
                           std::move(victim_received)});
  }
  return log;
}

std::vector<std::vector<ModelSnapshot>> observe(const RoundLog& log,
                                                const AttackerPlacement& placement,
                                                std::span<const int> rounds) {
  if (placement.mode == PlacementMode::kNone) {
    throw InputError("no attacker placed; nothing to observe");
  }
  std::vector<std::vector<ModelSnapshot>> out;
  out.reserve(rounds.size());
  for (int r : rounds) {
    const RoundRecord& record = log.at(r);
    std::vector<ModelSnapshot> seen;
    if (placement.mode == PlacementMode::kLocalPassive) {
      seen.push_back(record.distributed.with_tag(r));
    } else {
      for (const ModelSnapshot& upload : record.uploads) seen.push_back(upload.with_tag(r));
    }
    out.push_back(std::move(seen));
  }
  return out;
}

SnapshotSeries participant_view(
    const std::vector<std::vector<ModelSnapshot>>& observations,
    const AttackerPlacement& placement, int participant) {
  SnapshotSeries series;
  for (const auto& round : observations) {
    if (placement.mode == PlacementMode::kLocalPassive) {
      series.push_back(round.front());
    } else {
      if (participant < 0 || static_cast<std::size_t>(participant) >= round.size()) {
        throw InputError("participant out of range");
      }
      series.push_back(round[static_cast<std::size_t>(participant)]);
    }
  }
  return series;
}

namespace {

std::string round_dir(int round) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "round_%04d", round);
  return buf;
}

}  // namespace

void save_round_log(const RoundLog& log, const std::filesystem::path& dir) {
  json rounds = json::array();
  for (const RoundRecord& record : log.rounds()) {
    const std::string base = round_dir(record.round);
    json entry = {{"round", record.round}};
    entry["distributed"] = base + "/distributed.json";
    save_snapshot(record.distributed, dir / base / "distributed.json");
    json uploads = json::array();
    for (std::size_t p = 0; p < record.uploads.size(); ++p) {
      const std::string file = base + "/upload_" + std::to_string(p) + ".json";
      save_snapshot(record.uploads[p], dir / file);
      uploads.push_back(file);
    }
    entry["uploads"] = std::move(uploads);
    entry["global"] = base + "/global.json";
    save_snapshot(record.global, dir / base / "global.json");
    if (record.victim_received) {
      entry["victim_received"] = base + "/victim_received.json";
      save_snapshot(*record.victim_received, dir / base / "victim_received.json");
    } else {
      entry["victim_received"] = nullptr;
    }
    json interventions = json::array();
    for (const Intervention& i : record.interventions) {
      interventions.push_back({{"kind", to_string(i.kind)}, {"participant", i.participant}});
    }
    entry["interventions"] = std::move(interventions);
    rounds.push_back(std::move(entry));
  }
  const json manifest = {{"format", "mialab.round_log"}, {"version", 1},
                         {"rounds", std::move(rounds)}};
  write_text_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

RoundLog load_round_log(const std::filesystem::path& dir) {
  const json manifest = read_json_file(dir / "manifest.json");
  RoundLog log;
  try {
    if (manifest.at("format").get<std::string>() != "mialab.round_log") {
      throw InputError("not a round log manifest");
    }
    for (const json& entry : manifest.at("rounds")) {
      std::vector<ModelSnapshot> uploads;
      for (const json& file : entry.at("uploads")) {
        uploads.push_back(load_snapshot(dir / file.get<std::string>()));
      }
      std::vector<Intervention> interventions;
      for (const json& i : entry.at("interventions")) {
        const std::string kind = i.at("kind").get<std::string>();
        if (kind != "ascent" && kind != "isolation") {
          throw InputError("unknown intervention '" + kind + "'");
        }
        interventions.push_back({kind == "ascent" ? Intervention::Kind::kAscent
                                                  : Intervention::Kind::kIsolation,
                                 i.at("participant").get<int>()});
      }
      std::optional<ModelSnapshot> victim_received;
      if (!entry.at("victim_received").is_null()) {
        victim_received =
            load_snapshot(dir / entry.at("victim_received").get<std::string>());
      }
      log.append(RoundRecord{
          entry.at("round").get<int>(),
          load_snapshot(dir / entry.at("distributed").get<std::string>()),
          std::move(uploads),
          load_snapshot(dir / entry.at("global").get<std::string>()),
          std::move(interventions), std::move(victim_received)});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed round log manifest: ") + e.what());
  }
  return log;
}

}  // namespace mialab
