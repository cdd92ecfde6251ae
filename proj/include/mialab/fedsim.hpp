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

// Deterministic federated-learning simulation: a parameter server running
// FedAvg over N participants with local SGD, plus the attacker placements
// (passive global, passive local, active global with optional isolation).

#ifndef MIALAB_FEDSIM_HPP_
#define MIALAB_FEDSIM_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mialab/nn.hpp"
#include "mialab/training.hpp"

namespace mialab {

struct FLConfig {
  int num_participants = 4;
  int rounds = 60;
  int local_epochs = 1;
  int batch_size = 32;
  double lr = 0.05;
  // Sorted rounds in [1, rounds]; their span is the active-attack window.
  std::vector<int> observation_rounds;
  std::uint64_t seed = 0;
  // Optional per-participant stream seeds. When empty, participant p in
  // round r draws from the stream keyed (seed, p, r); otherwise from
  // (participant_seeds[p], r).
  std::vector<std::uint64_t> participant_seeds;
  // Train participants of a round on separate threads.
  bool parallel = false;

  void validate() const;
  friend bool operator==(const FLConfig&, const FLConfig&) = default;
};

enum class PlacementMode { kNone, kGlobalPassive, kGlobalActive, kLocalPassive };

std::string to_string(PlacementMode mode);

struct AttackerPlacement {
  PlacementMode mode = PlacementMode::kNone;
  // kGlobalActive only.
  double gamma = 0.0;
  LabeledSet target_samples;
  bool isolate = false;
  int victim = 0;
  // kLocalPassive only.
  int observer = 1;

  static AttackerPlacement none() { return {}; }
  static AttackerPlacement global_passive() {
    AttackerPlacement p;
    p.mode = PlacementMode::kGlobalPassive;
    return p;
  }
  static AttackerPlacement global_active(double gamma, LabeledSet targets,
                                         bool isolate, int victim = 0) {
    AttackerPlacement p;
    p.mode = PlacementMode::kGlobalActive;
    p.gamma = gamma;
    p.target_samples = std::move(targets);
    p.isolate = isolate;
    p.victim = victim;
    return p;
  }
  static AttackerPlacement local_passive(int observer) {
    AttackerPlacement p;
    p.mode = PlacementMode::kLocalPassive;
    p.observer = observer;
    return p;
  }

  void validate(int num_participants) const;
};

struct Intervention {
  enum class Kind { kAscent, kIsolation };
  Kind kind = Kind::kAscent;
  int participant = 0;

  friend bool operator==(const Intervention&, const Intervention&) = default;
};

std::string to_string(Intervention::Kind kind);

struct RoundRecord {
  int round = 0;
  // Global parameters sent out at the start of the round.
  ModelSnapshot distributed;
  // One per participant, ordered by participant id.
  std::vector<ModelSnapshot> uploads;
  // Server state after aggregation.
  ModelSnapshot global;
  std::vector<Intervention> interventions;
  // What the victim actually received when an intervention applied.
  std::optional<ModelSnapshot> victim_received;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

// Append-only transcript of a federated run, indexed by round (1-based).
class RoundLog {
 public:
  void append(RoundRecord record);
  const std::vector<RoundRecord>& rounds() const { return records_; }
  const RoundRecord& at(int round) const;
  int size() const { return static_cast<int>(records_.size()); }

  friend bool operator==(const RoundLog&, const RoundLog&) = default;

 private:
  std::vector<RoundRecord> records_;
};

// Element-wise arithmetic mean of congruent parameter lists.
Params fedavg(std::span<const Params> uploads);

// Runs cfg.rounds rounds. Each participant trains on its split's members.
RoundLog fl_run(const Architecture& arch,
                std::span<const DatasetSplit> participant_datasets,
                const FLConfig& cfg, const AttackerPlacement& placement);

// What the attacker sees at each listed round: every participant's upload
// for global placements, the distributed global model for a local one.
// Snapshots are tagged with the observation round.
std::vector<std::vector<ModelSnapshot>> observe(const RoundLog& log,
                                                const AttackerPlacement& placement,
                                                std::span<const int> rounds);

// The per-round sequence the attacker attributes to `participant`.
SnapshotSeries participant_view(
    const std::vector<std::vector<ModelSnapshot>>& observations,
    const AttackerPlacement& placement, int participant);

// Directory of per-round snapshot files plus manifest.json.
void save_round_log(const RoundLog& log, const std::filesystem::path& dir);
RoundLog load_round_log(const std::filesystem::path& dir);

}  // namespace mialab

#endif  // MIALAB_FEDSIM_HPP_
