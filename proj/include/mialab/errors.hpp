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

#ifndef MIALAB_ERRORS_HPP_
#define MIALAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mialab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: shape mismatches, invalid configurations, bad files.
class InputError : public Error {
 public:
  using Error::Error;
};

// Configuration documents that fail validation.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// Non-finite values or diverging optimisation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mialab

#endif  // MIALAB_ERRORS_HPP_
