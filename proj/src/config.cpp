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

#include "mialab/config.hpp"

#include <limits>
#include <set>
#include <type_traits>

#include "mialab/snapshot_io.hpp"

namespace mialab {

namespace {

using nlohmann::json;

// Reads typed fields from one object and remembers which keys were used.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(where() + " must be an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void read(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      const auto n = v->get<std::int64_t>();
      if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
        fail(key, "an integer in range");
      }
      out = static_cast<int>(n);
    }
  }
  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  template <typename Int>
  void read(const char* key, std::vector<Int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of integers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number_integer()) fail(key, "an array of integers");
        if constexpr (std::is_unsigned_v<Int>) {
          if (!e.is_number_unsigned()) fail(key, "an array of non-negative integers");
        }
        out.push_back(e.get<Int>());
      }
    }
  }

  std::string child(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + child(it.key().c_str()));
    }
  }

 private:
  std::string where() const { return path_; }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError(child(key) + " must be " + what);
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_dataset(const json& doc, DatasetSpec& d) {
  Section s(doc, "$.dataset");
  s.read("num_classes", d.num_classes);
  s.read("dim", d.dim);
  s.read("per_class", d.per_class);
  s.read("separation", d.separation);
  s.read("finetune_per_class", d.finetune_per_class);
  s.finish();
}

void read_training(const json& doc, ExperimentSpec& spec) {
  Section s(doc, "$.training");
  s.read("epochs", spec.training.epochs);
  s.read("batch_size", spec.training.batch_size);
  s.read("lr", spec.training.lr);
  s.read("snapshot_epochs", spec.training.snapshot_epochs);
  s.read("finetune_epochs", spec.finetune_epochs);
  s.finish();
}

void read_federated(const json& doc, FederatedSpec& f) {
  Section s(doc, "$.federated");
  s.read("num_participants", f.num_participants);
  s.read("rounds", f.rounds);
  s.read("local_epochs", f.local_epochs);
  s.read("batch_size", f.batch_size);
  s.read("lr", f.lr);
  s.read("gamma", f.gamma);
  s.read("victim", f.victim);
  s.read("observer", f.observer);
  s.read("parallel", f.parallel);
  s.finish();
}

void read_features(const json& doc, FeatureConfig& fc) {
  Section s(doc, "$.features");
  s.read("observed_layers", fc.observed_layers);
  s.read("gradient_layers", fc.gradient_layers);
  std::string mode = to_string(fc.gradient_mode);
  s.read("gradient_mode", mode);
  try {
    fc.gradient_mode = parse_gradient_mode(mode);
  } catch (const InputError& e) {
    throw ConfigError(std::string("$.features.gradient_mode: ") + e.what());
  }
  s.read("include_loss", fc.include_loss);
  s.read("include_label", fc.include_label);
  s.finish();
}

void read_attack(const json& doc, ExperimentSpec& spec) {
  Section s(doc, "$.attack");
  s.read("epochs", spec.attack.epochs);
  s.read("batch_size", spec.attack.batch_size);
  s.read("lr", spec.attack.lr);
  s.read("train_fraction", spec.attack.train_fraction);
  s.read("submodule_hidden", spec.attack_submodule_hidden);
  s.read("encoder_hidden", spec.attack_encoder_hidden);
  s.finish();
}

}  // namespace

ExperimentSpec spec_from_json(const json& doc) {
  ExperimentSpec spec;
  Section root(doc, "$");
  std::string scenario = to_string(spec.scenario);
  root.read("scenario", scenario);
  spec.scenario = parse_scenario(scenario);
  root.read("seeds", spec.seeds);
  root.read("parallel_seeds", spec.parallel_seeds);
  if (const json* v = root.find("dataset")) read_dataset(*v, spec.dataset);
  if (const json* v = root.find("model")) {
    Section s(*v, "$.model");
    s.read("hidden", spec.hidden);
    s.finish();
  }
  if (const json* v = root.find("training")) read_training(*v, spec);
  if (const json* v = root.find("federated")) {
    FederatedSpec f;
    read_federated(*v, f);
    spec.federated = f;
  }
  if (const json* v = root.find("features")) {
    FeatureConfig fc;
    read_features(*v, fc);
    spec.features = fc;
  }
  if (const json* v = root.find("attack")) read_attack(*v, spec);
  root.finish();
  try {
    spec.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

json to_json(const ExperimentSpec& spec) {
  json doc;
  doc["scenario"] = to_string(spec.scenario);
  doc["seeds"] = spec.seeds;
  doc["parallel_seeds"] = spec.parallel_seeds;
  const DatasetSpec& d = spec.dataset;
  doc["dataset"] = {{"num_classes", d.num_classes},
                    {"dim", d.dim},
                    {"per_class", d.per_class},
                    {"separation", d.separation},
                    {"finetune_per_class", d.finetune_per_class}};
  doc["model"] = {{"hidden", spec.hidden}};
  doc["training"] = {{"epochs", spec.training.epochs},
                     {"batch_size", spec.training.batch_size},
                     {"lr", spec.training.lr},
                     {"snapshot_epochs", spec.training.snapshot_epochs},
                     {"finetune_epochs", spec.finetune_epochs}};
  if (spec.federated) {
    const FederatedSpec& f = *spec.federated;
    doc["federated"] = {{"num_participants", f.num_participants},
                        {"rounds", f.rounds},
                        {"local_epochs", f.local_epochs},
                        {"batch_size", f.batch_size},
                        {"lr", f.lr},
                        {"gamma", f.gamma},
                        {"victim", f.victim},
                        {"observer", f.observer},
                        {"parallel", f.parallel}};
  }
  if (spec.features) {
    const FeatureConfig& fc = *spec.features;
    doc["features"] = {{"observed_layers", fc.observed_layers},
                       {"gradient_layers", fc.gradient_layers},
                       {"gradient_mode", to_string(fc.gradient_mode)},
                       {"include_loss", fc.include_loss},
                       {"include_label", fc.include_label}};
  }
  doc["attack"] = {{"epochs", spec.attack.epochs},
                   {"batch_size", spec.attack.batch_size},
                   {"lr", spec.attack.lr},
                   {"train_fraction", spec.attack.train_fraction},
                   {"submodule_hidden", spec.attack_submodule_hidden},
                   {"encoder_hidden", spec.attack_encoder_hidden}};
  return doc;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  return spec_from_json(doc);
}

void save_config(const ExperimentSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, to_json(spec).dump(2) + "\n");
}

}  // namespace mialab
