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

#ifndef MIALAB_RNG_HPP_
#define MIALAB_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mialab {

using Rng = std::mt19937_64;

// Independent stream keyed by an ordered tuple of integers, e.g.
// (seed, participant, round). Distinct keys give unrelated streams.
inline Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * keys.size() + 1);
  words.push_back(static_cast<std::uint32_t>(keys.size()));
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Stream tags so different consumers of one seed never share a stream.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kData = 3,
  kFineTune = 4,
  kAttackSplit = 5,
  kAttackInit = 6,
  kAttackShuffle = 7,
  kCluster = 8,
  kParticipant = 9,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return make_rng({seed, static_cast<std::uint64_t>(stream)});
}

}  // namespace mialab

#endif  // MIALAB_RNG_HPP_
