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

// Structured-text (JSON) persistence for model snapshots. Doubles are
// written in shortest round-trip form, so save/load is bit-exact.

#ifndef MIALAB_SNAPSHOT_IO_HPP_
#define MIALAB_SNAPSHOT_IO_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mialab/nn.hpp"

namespace mialab {

nlohmann::json to_json(const Architecture& arch);
Architecture architecture_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Tensor& tensor);
Tensor tensor_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ModelSnapshot& snapshot);
ModelSnapshot snapshot_from_json(const nlohmann::json& doc);

void save_snapshot(const ModelSnapshot& snapshot,
                   const std::filesystem::path& path);
ModelSnapshot load_snapshot(const std::filesystem::path& path);

// Shared helpers for the other document formats.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);

}  // namespace mialab

#endif  // MIALAB_SNAPSHOT_IO_HPP_
