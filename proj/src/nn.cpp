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

#include "mialab/nn.hpp"

#include <string>

namespace mialab {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense:
      return "dense";
    case LayerKind::kReLU:
      return "relu";
    case LayerKind::kSoftmax:
      return "softmax";
  }
  return "unknown";
}

LayerKind parse_layer_kind(const std::string& name) {
  if (name == "dense") return LayerKind::kDense;
  if (name == "relu") return LayerKind::kReLU;
  if (name == "softmax") return LayerKind::kSoftmax;
  throw InputError("unknown layer kind '" + name + "'");
}

void validate_architecture(const Architecture& arch) {
  if (arch.empty()) throw InputError("architecture has no layers");
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const LayerSpec& layer = arch[i];
    const std::string where = "layer " + std::to_string(i) + " (" +
                              to_string(layer.kind) + ")";
    if (layer.in_dim <= 0 || layer.out_dim <= 0) {
      throw InputError(where + " needs positive dimensions");
    }
    if (layer.kind != LayerKind::kDense) {
      if (layer.in_dim != layer.out_dim) {
        throw InputError(where + " must preserve width");
      }
      if (layer.has_bias) throw InputError(where + " cannot have a bias");
    }
    if (layer.kind == LayerKind::kSoftmax && i + 1 != arch.size()) {
      throw InputError("Softmax may only appear as the final layer");
    }
    if (i > 0 && arch[i - 1].out_dim != layer.in_dim) {
      throw InputError(where + " expects width " +
                       std::to_string(layer.in_dim) + " but previous layer "
                       "produces " + std::to_string(arch[i - 1].out_dim));
    }
  }
}

Index input_dim(const Architecture& arch) {
  if (arch.empty()) throw InputError("architecture has no layers");
  return arch.front().in_dim;
}

Index output_dim(const Architecture& arch) {
  if (arch.empty()) throw InputError("architecture has no layers");
  return arch.back().out_dim;
}

bool ends_with_softmax(const Architecture& arch) {
  return !arch.empty() && arch.back().kind == LayerKind::kSoftmax;
}

std::vector<Shape> parameter_shapes(const Architecture& arch) {
  std::vector<Shape> shapes;
  for (const LayerSpec& layer : arch) {
    if (layer.kind != LayerKind::kDense) continue;
    shapes.push_back({layer.out_dim, layer.in_dim});
    if (layer.has_bias) shapes.push_back({layer.out_dim});
  }
  return shapes;
}

std::vector<int> parameter_offsets(const Architecture& arch) {
  std::vector<int> offsets(arch.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (arch[i].kind != LayerKind::kDense) continue;
    offsets[i] = next;
    next += arch[i].has_bias ? 2 : 1;
  }
  return offsets;
}

int parameter_count(const Architecture& arch, std::size_t layer) {
  if (layer >= arch.size() || arch[layer].kind != LayerKind::kDense) return 0;
  return arch[layer].has_bias ? 2 : 1;
}

Architecture make_mlp(Index in, std::span<const Index> hidden, Index out,
                      bool softmax) {
  Architecture arch;
  Index width = in;
  for (Index h : hidden) {
    arch.push_back(LayerSpec::dense(width, h));
    arch.push_back(LayerSpec::relu(h));
    width = h;
  }
  arch.push_back(LayerSpec::dense(width, out));
  if (softmax) arch.push_back(LayerSpec::softmax(out));
  validate_architecture(arch);
  return arch;
}

}  // namespace mialab
