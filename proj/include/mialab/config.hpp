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

// Run-level JSON configuration. Every section is optional and falls back
// to the defaults of the corresponding struct; unknown keys are rejected.

#ifndef MIALAB_CONFIG_HPP_
#define MIALAB_CONFIG_HPP_

#include <filesystem>

#include "json.hpp"
#include "mialab/experiment.hpp"

namespace mialab {

// Throws ConfigError naming the offending key.
ExperimentSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentSpec& spec);

ExperimentSpec load_config(const std::filesystem::path& path);
void save_config(const ExperimentSpec& spec, const std::filesystem::path& path);

}  // namespace mialab

#endif  // MIALAB_CONFIG_HPP_
