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

// Feed-forward network engine: Dense / ReLU / Softmax layers, exact
// reverse-mode gradients, and plain SGD / gradient-ascent updates.
//
// Batches are Eigen matrices with one sample per row. Dense weights are
// stored as row-major [out, in] tensors, biases as [out].

#ifndef MIALAB_NN_HPP_
#define MIALAB_NN_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"
#include "mialab/tensor.hpp"

namespace mialab {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class LayerKind { kDense, kReLU, kSoftmax };

std::string to_string(LayerKind kind);
LayerKind parse_layer_kind(const std::string& name);

// Element-wise layers carry their width so an architecture is
// self-describing without running data through it.
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  Index in_dim = 0;
  Index out_dim = 0;
  bool has_bias = false;

  static LayerSpec dense(Index in, Index out, bool bias = true) {
    return {LayerKind::kDense, in, out, bias};
  }
  static LayerSpec relu(Index width) {
    return {LayerKind::kReLU, width, width, false};
  }
  static LayerSpec softmax(Index width) {
    return {LayerKind::kSoftmax, width, width, false};
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

using Architecture = std::vector<LayerSpec>;

// Throws InputError unless layers chain, Softmax is at most once and final.
void validate_architecture(const Architecture& arch);

Index input_dim(const Architecture& arch);
Index output_dim(const Architecture& arch);
bool ends_with_softmax(const Architecture& arch);

// Shapes of all parameter tensors, weights then bias per Dense layer.
std::vector<Shape> parameter_shapes(const Architecture& arch);

// Index of the first parameter tensor owned by each layer, -1 if none.
std::vector<int> parameter_offsets(const Architecture& arch);

// Number of parameter tensors owned by layer `layer` (0, 1 or 2).
int parameter_count(const Architecture& arch, std::size_t layer);

// Dense -> ReLU -> ... -> Dense [-> Softmax].
Architecture make_mlp(Index in, std::span<const Index> hidden, Index out,
                      bool softmax);

// Glorot-uniform weights in [-a, a], a = sqrt(6 / (in + out)); zero biases.
template <typename Scalar>
BasicParams<Scalar> initialize_params(const Architecture& arch, Rng& rng) {
  validate_architecture(arch);
  BasicParams<Scalar> params;
  for (const LayerSpec& layer : arch) {
    if (layer.kind != LayerKind::kDense) continue;
    const double a = std::sqrt(6.0 / static_cast<double>(layer.in_dim +
                                                        layer.out_dim));
    std::uniform_real_distribution<double> dist(-a, a);
    VectorX<Scalar> w(layer.out_dim * layer.in_dim);
    for (Index i = 0; i < w.size(); ++i) w[i] = static_cast<Scalar>(dist(rng));
    params.emplace_back(Shape{layer.out_dim, layer.in_dim}, std::move(w));
    if (layer.has_bias) {
      params.push_back(BasicTensor<Scalar>::zeros({layer.out_dim}));
    }
  }
  return params;
}

// Architecture plus parameters at one training point. Immutable: every
// operation that changes parameters returns a new snapshot.
template <typename Scalar>
class BasicModelSnapshot {
 public:
  BasicModelSnapshot(Architecture arch, BasicParams<Scalar> params,
                     std::int64_t tag = 0)
      : arch_(std::move(arch)), params_(std::move(params)), tag_(tag) {
    validate_architecture(arch_);
    const std::vector<Shape> shapes = parameter_shapes(arch_);
    if (shapes.size() != params_.size()) {
      throw InputError("snapshot has " + std::to_string(params_.size()) +
                       " parameter tensors, architecture needs " +
                       std::to_string(shapes.size()));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      if (shapes[i] != params_[i].shape()) {
        throw InputError("parameter " + std::to_string(i) + " has shape " +
                         shape_string(params_[i].shape()) + ", expected " +
                         shape_string(shapes[i]));
      }
    }
  }

  static BasicModelSnapshot initialized(const Architecture& arch, Rng& rng,
                                        std::int64_t tag = 0) {
    return BasicModelSnapshot(arch, initialize_params<Scalar>(arch, rng), tag);
  }

  const Architecture& arch() const { return arch_; }
  const BasicParams<Scalar>& params() const { return params_; }
  std::int64_t tag() const { return tag_; }

  BasicModelSnapshot with_params(BasicParams<Scalar> params) const {
    return BasicModelSnapshot(arch_, std::move(params), tag_);
  }
  BasicModelSnapshot with_tag(std::int64_t tag) const {
    BasicModelSnapshot copy = *this;
    copy.tag_ = tag;
    return copy;
  }

  friend bool operator==(const BasicModelSnapshot&,
                         const BasicModelSnapshot&) = default;

 private:
  Architecture arch_;
  BasicParams<Scalar> params_;
  std::int64_t tag_ = 0;
};

using ModelSnapshot = BasicModelSnapshot<double>;

template <typename Scalar>
struct BasicForwardTrace {
  MatrixX<Scalar> input;
  // One entry per layer, each with one row per sample.
  std::vector<MatrixX<Scalar>> outputs;
  // Set only when labels were supplied.
  std::vector<int> labels;
  VectorX<Scalar> losses;

  const MatrixX<Scalar>& layer_input(std::size_t layer) const {
    return layer == 0 ? input : outputs[layer - 1];
  }
  const MatrixX<Scalar>& final_output() const { return outputs.back(); }
};

using ForwardTrace = BasicForwardTrace<double>;

template <typename Scalar>
struct BasicGradients {
  BasicParams<Scalar> params;
  MatrixX<Scalar> input;
};

namespace internal {

template <typename Scalar>
MatrixX<Scalar> softmax_rows(const MatrixX<Scalar>& z) {
  MatrixX<Scalar> out(z.rows(), z.cols());
  for (Index r = 0; r < z.rows(); ++r) {
    const Scalar m = z.row(r).maxCoeff();
    out.row(r) = (z.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

template <typename Scalar>
Scalar log_sum_exp(const Eigen::Ref<const VectorX<Scalar>>& z) {
  const Scalar m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

inline void require_finite_output(bool finite, std::size_t layer) {
  if (!finite) {
    throw NumericError("non-finite activation at layer " +
                       std::to_string(layer));
  }
}

}  // namespace internal

// Runs the batch through every layer and records each layer's output.
template <typename Scalar>
BasicForwardTrace<Scalar> forward(const BasicModelSnapshot<Scalar>& model,
                                  const MatrixX<Scalar>& batch) {
  const Architecture& arch = model.arch();
  if (batch.cols() != input_dim(arch)) {
    throw InputError("batch has " + std::to_string(batch.cols()) +
                     " features, model expects " +
                     std::to_string(input_dim(arch)));
  }
  if (!batch.allFinite()) throw NumericError("non-finite input batch");
  const std::vector<int> offsets = parameter_offsets(arch);

  BasicForwardTrace<Scalar> trace;
  trace.input = batch;
  trace.outputs.reserve(arch.size());
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const MatrixX<Scalar>& x = trace.layer_input(i);
    MatrixX<Scalar> y;
    switch (arch[i].kind) {
      case LayerKind::kDense: {
        const auto& params = model.params();
        y.noalias() = x * params[offsets[i]].matrix().transpose();
        if (arch[i].has_bias) {
          y.rowwise() += params[offsets[i] + 1].matrix().row(0);
        }
        break;
      }
      case LayerKind::kReLU:
        y = (x.array() > Scalar(0)).select(x, Scalar(0));
        break;
      case LayerKind::kSoftmax:
        y = internal::softmax_rows(x);
        break;
    }
    internal::require_finite_output(y.allFinite(), i);
    trace.outputs.push_back(std::move(y));
  }
  return trace;
}

// Forward pass plus per-sample softmax cross-entropy, computed from the
// logits with log-sum-exp. The model must end in Softmax.
template <typename Scalar>
BasicForwardTrace<Scalar> forward(const BasicModelSnapshot<Scalar>& model,
                                  const MatrixX<Scalar>& batch,
                                  std::span<const int> labels) {
  if (!ends_with_softmax(model.arch())) {
    throw InputError("cross-entropy needs a model ending in Softmax");
  }
  if (static_cast<Index>(labels.size()) != batch.rows()) {
    throw InputError("label count " + std::to_string(labels.size()) +
                     " does not match batch size " +
                     std::to_string(batch.rows()));
  }
  const Index classes = output_dim(model.arch());
  for (int y : labels) {
    if (y < 0 || y >= classes) {
      throw InputError("label " + std::to_string(y) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
  }
  BasicForwardTrace<Scalar> trace = forward(model, batch);
  trace.labels.assign(labels.begin(), labels.end());
  const MatrixX<Scalar>& logits = trace.layer_input(model.arch().size() - 1);
  trace.losses.resize(batch.rows());
  for (Index r = 0; r < batch.rows(); ++r) {
    const VectorX<Scalar> z = logits.row(r).transpose();
    trace.losses[r] = internal::log_sum_exp<Scalar>(z) - z[labels[r]];
  }
  if (!trace.losses.allFinite()) throw NumericError("non-finite loss");
  return trace;
}

// Propagates dL/d(output of layer end-1) back through layers [0, end).
// Parameter gradients are summed over the rows of `grad`.
template <typename Scalar>
BasicGradients<Scalar> backpropagate(const BasicModelSnapshot<Scalar>& model,
                                     const BasicForwardTrace<Scalar>& trace,
                                     std::size_t end, MatrixX<Scalar> grad) {
  const Architecture& arch = model.arch();
  const std::vector<int> offsets = parameter_offsets(arch);
  BasicGradients<Scalar> out;
  out.params = zeros_like(model.params());
  for (std::size_t i = end; i-- > 0;) {
    const MatrixX<Scalar>& x = trace.layer_input(i);
    switch (arch[i].kind) {
      case LayerKind::kDense: {
        const auto w = model.params()[offsets[i]].matrix();
        out.params[offsets[i]].matrix().noalias() = grad.transpose() * x;
        if (arch[i].has_bias) {
          out.params[offsets[i] + 1].matrix() = grad.colwise().sum();
        }
        MatrixX<Scalar> next;
        next.noalias() = grad * w;
        grad = std::move(next);
        break;
      }
      case LayerKind::kReLU:
        // Subgradient 0 at 0, matching the y <= 0 branch.
        grad = (x.array() > Scalar(0)).select(grad, Scalar(0));
        break;
      case LayerKind::kSoftmax: {
        const MatrixX<Scalar>& p = trace.outputs[i];
        const VectorX<Scalar> dot = (grad.array() * p.array()).rowwise().sum();
        grad = (p.array() * (grad.array().colwise() - dot.array())).matrix();
        break;
      }
    }
  }
  out.input = std::move(grad);
  return out;
}

// Gradients of sum_rows <output_grad, final output>.
template <typename Scalar>
BasicGradients<Scalar> backward(const BasicModelSnapshot<Scalar>& model,
                                const BasicForwardTrace<Scalar>& trace,
                                const MatrixX<Scalar>& output_grad) {
  if (output_grad.rows() != trace.final_output().rows() ||
      output_grad.cols() != trace.final_output().cols()) {
    throw InputError("output gradient shape does not match forward trace");
  }
  return backpropagate(model, trace, model.arch().size(), output_grad);
}

// Mean cross-entropy gradient over the labelled batch in `trace`.
template <typename Scalar>
BasicParams<Scalar> loss_gradient(const BasicModelSnapshot<Scalar>& model,
                                  const BasicForwardTrace<Scalar>& trace) {
  if (trace.labels.empty()) throw InputError("trace carries no labels");
  MatrixX<Scalar> g = trace.final_output();
  for (Index r = 0; r < g.rows(); ++r) g(r, trace.labels[r]) -= Scalar(1);
  g /= static_cast<Scalar>(g.rows());
  // Softmax and cross-entropy are fused: the gradient at the logits is
  // p - onehot, so propagation starts below the Softmax layer.
  BasicGradients<Scalar> grads =
      backpropagate(model, trace, model.arch().size() - 1, std::move(g));
  if (!all_finite(grads.params)) throw NumericError("non-finite gradient");
  return std::move(grads.params);
}

// Cross-entropy gradient of a single sample w.r.t. every parameter tensor.
template <typename Scalar>
BasicParams<Scalar> backward_per_sample(const BasicModelSnapshot<Scalar>& model,
                                        const VectorX<Scalar>& x, int label) {
  const MatrixX<Scalar> batch = x.transpose();
  const int labels[] = {label};
  return loss_gradient(model, forward(model, batch, std::span<const int>(labels)));
}

// W' = W - lr * g.
template <typename Scalar>
BasicParams<Scalar> sgd_step(const BasicParams<Scalar>& params,
                             const BasicParams<Scalar>& mean_gradients,
                             Scalar lr) {
  if (!(lr > Scalar(0))) throw InputError("learning rate must be positive");
  BasicParams<Scalar> out = axpy(params, -lr, mean_gradients);
  if (!all_finite(out)) throw NumericError("SGD step produced non-finite parameters");
  return out;
}

// W' = W + gamma * dL_x/dW: ascent on the target samples' loss.
template <typename Scalar>
BasicParams<Scalar> ascent_step(const BasicParams<Scalar>& params,
                                const BasicParams<Scalar>& target_gradients,
                                Scalar gamma) {
  if (!(gamma >= Scalar(0))) throw InputError("ascent rate must be non-negative");
  BasicParams<Scalar> out = axpy(params, gamma, target_gradients);
  if (!all_finite(out)) throw NumericError("ascent step produced non-finite parameters");
  return out;
}

}  // namespace mialab

#endif  // MIALAB_NN_HPP_
