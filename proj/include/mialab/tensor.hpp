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

#ifndef MIALAB_TENSOR_HPP_
#define MIALAB_TENSOR_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mialab/errors.hpp"

namespace mialab {

using Eigen::Index;
using Shape = std::vector<Index>;

inline Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1},
                         std::multiplies<Index>());
}

inline std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// Dense n-dimensional array stored contiguously in row-major order.
template <typename Scalar>
class BasicTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowMajorMatrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BasicTensor() = default;

  BasicTensor(Shape shape, Vector data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    for (Index d : shape_) {
      if (d <= 0) {
        throw InputError("tensor dimensions must be positive, got " +
                         shape_string(shape_));
      }
    }
    if (shape_size(shape_) != data_.size()) {
      throw InputError("tensor shape " + shape_string(shape_) +
                       " does not match data length " +
                       std::to_string(data_.size()));
    }
  }

  static BasicTensor zeros(Shape shape) {
    const Index n = shape_size(shape);
    return BasicTensor(std::move(shape), Vector::Zero(n));
  }

  // Copies a 2-D Eigen expression into row-major storage.
  template <typename Derived>
  static BasicTensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    RowMajorMatrix rm = m;
    Vector flat = Eigen::Map<const Vector>(rm.data(), rm.size());
    return BasicTensor({rm.rows(), rm.cols()}, std::move(flat));
  }

  template <typename Derived>
  static BasicTensor from_vector(const Eigen::MatrixBase<Derived>& v) {
    Vector flat = v;
    const Index n = flat.size();
    return BasicTensor({n}, std::move(flat));
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index size() const { return data_.size(); }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  // Rank-2 view; a rank-1 tensor is viewed as a single row.
  Eigen::Map<const RowMajorMatrix> matrix() const {
    return Eigen::Map<const RowMajorMatrix>(data_.data(), rows(), cols());
  }
  Eigen::Map<RowMajorMatrix> matrix() {
    return Eigen::Map<RowMajorMatrix>(data_.data(), rows(), cols());
  }

  bool all_finite() const { return data_.allFinite(); }

  Scalar squared_norm() const { return data_.squaredNorm(); }

  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_.size() == b.data_.size() &&
           (a.data_.array() == b.data_.array()).all();
  }

 private:
  Index rows() const {
    if (shape_.size() == 1) return 1;
    if (shape_.size() != 2) throw InputError("matrix view needs rank <= 2");
    return shape_[0];
  }
  Index cols() const { return shape_.back(); }

  Shape shape_;
  Vector data_;
};

template <typename Scalar>
using BasicParams = std::vector<BasicTensor<Scalar>>;

using Tensor = BasicTensor<double>;
using Params = BasicParams<double>;

template <typename Scalar>
void require_congruent(const BasicParams<Scalar>& a,
                       const BasicParams<Scalar>& b, const char* what) {
  if (a.size() != b.size()) {
    throw InputError(std::string(what) + ": parameter count mismatch (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].shape() != b[i].shape()) {
      throw InputError(std::string(what) + ": shape mismatch at tensor " +
                       std::to_string(i) + " " + shape_string(a[i].shape()) +
                       " vs " + shape_string(b[i].shape()));
    }
  }
}

template <typename Scalar>
bool all_finite(const BasicParams<Scalar>& params) {
  for (const auto& t : params) {
    if (!t.all_finite()) return false;
  }
  return true;
}

// Elementwise a + alpha * b over congruent parameter lists.
template <typename Scalar>
BasicParams<Scalar> axpy(const BasicParams<Scalar>& a, Scalar alpha,
                         const BasicParams<Scalar>& b) {
  require_congruent(a, b, "axpy");
  BasicParams<Scalar> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].data() += alpha * b[i].data();
  }
  return out;
}

template <typename Scalar>
BasicParams<Scalar> scaled(const BasicParams<Scalar>& a, Scalar alpha) {
  BasicParams<Scalar> out = a;
  for (auto& t : out) t.data() *= alpha;
  return out;
}

template <typename Scalar>
BasicParams<Scalar> zeros_like(const BasicParams<Scalar>& a) {
  BasicParams<Scalar> out;
  out.reserve(a.size());
  for (const auto& t : a) out.push_back(BasicTensor<Scalar>::zeros(t.shape()));
  return out;
}

template <typename Scalar>
Index total_size(const BasicParams<Scalar>& params) {
  Index n = 0;
  for (const auto& t : params) n += t.size();
  return n;
}

// Concatenates every tensor into one flat vector.
template <typename Scalar>
typename BasicTensor<Scalar>::Vector flatten(const BasicParams<Scalar>& params) {
  typename BasicTensor<Scalar>::Vector out(total_size(params));
  Index offset = 0;
  for (const auto& t : params) {
    out.segment(offset, t.size()) = t.data();
    offset += t.size();
  }
  return out;
}

template <typename Scalar>
Scalar l2_norm(const BasicTensor<Scalar>& t) {
  return std::sqrt(t.squared_norm());
}

}  // namespace mialab

#endif  // MIALAB_TENSOR_HPP_
