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

#include "mialab/snapshot_io.hpp"

#include <fstream>
#include <sstream>

namespace mialab {

using nlohmann::json;

namespace {

constexpr const char* kSnapshotFormat = "mialab.model_snapshot";

}  // namespace

json to_json(const Architecture& arch) {
  json layers = json::array();
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const LayerSpec& layer = arch[i];
    json entry = {{"layer", i}, {"kind", to_string(layer.kind)}};
    if (layer.kind == LayerKind::kDense) {
      entry["in"] = layer.in_dim;
      entry["out"] = layer.out_dim;
      entry["bias"] = layer.has_bias;
    } else {
      entry["width"] = layer.in_dim;
    }
    layers.push_back(std::move(entry));
  }
  return layers;
}

Architecture architecture_from_json(const json& doc) {
  if (!doc.is_array()) throw InputError("architecture must be a list");
  Architecture arch;
  try {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const json& entry = doc[i];
      if (entry.at("layer").get<std::size_t>() != i) {
        throw InputError("architecture entries out of order at " +
                         std::to_string(i));
      }
      const LayerKind kind = parse_layer_kind(entry.at("kind").get<std::string>());
      if (kind == LayerKind::kDense) {
        arch.push_back(LayerSpec::dense(entry.at("in").get<Index>(),
                                        entry.at("out").get<Index>(),
                                        entry.at("bias").get<bool>()));
      } else {
        const Index width = entry.at("width").get<Index>();
        arch.push_back(kind == LayerKind::kReLU ? LayerSpec::relu(width)
                                                : LayerSpec::softmax(width));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed architecture: ") + e.what());
  }
  validate_architecture(arch);
  return arch;
}

json to_json(const Tensor& tensor) {
  const auto& data = tensor.data();
  return {{"shape", tensor.shape()},
          {"data", std::vector<double>(data.data(), data.data() + data.size())}};
}

Tensor tensor_from_json(const json& doc) {
  try {
    Shape shape = doc.at("shape").get<Shape>();
    const auto values = doc.at("data").get<std::vector<double>>();
    Tensor::Vector data = Eigen::Map<const Tensor::Vector>(
        values.data(), static_cast<Index>(values.size()));
    return Tensor(std::move(shape), std::move(data));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed tensor: ") + e.what());
  }
}

json to_json(const ModelSnapshot& snapshot) {
  json params = json::array();
  for (const Tensor& t : snapshot.params()) params.push_back(to_json(t));
  return {{"format", kSnapshotFormat},
          {"version", 1},
          {"tag", snapshot.tag()},
          {"arch", to_json(snapshot.arch())},
          {"params", std::move(params)}};
}

ModelSnapshot snapshot_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kSnapshotFormat) {
      throw InputError("not a model snapshot document");
    }
    Params params;
    for (const json& t : doc.at("params")) params.push_back(tensor_from_json(t));
    ModelSnapshot snapshot(architecture_from_json(doc.at("arch")),
                           std::move(params), doc.at("tag").get<std::int64_t>());
    if (!all_finite(snapshot.params())) {
      throw InputError("snapshot contains non-finite parameters");
    }
    return snapshot;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed snapshot: ") + e.what());
  }
}

void save_snapshot(const ModelSnapshot& snapshot,
                   const std::filesystem::path& path) {
  write_text_file(path, to_json(snapshot).dump(1) + "\n");
}

ModelSnapshot load_snapshot(const std::filesystem::path& path) {
  return snapshot_from_json(read_json_file(path));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace mialab
