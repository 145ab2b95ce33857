// Copyright 2026 The e2v Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <string>

#include "e2v/common.hpp"
#include "e2v/nn/tensor.hpp"

namespace e2v::nn {

/// Handle to a value recorded on a Graph.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
  friend bool operator==(Var, Var) = default;
};

/// Define-by-run reverse-mode tape. Every op appends a node holding its
/// output value and, when any input requires a gradient, a closure that
/// pushes the node's gradient into its inputs. Nodes live in a deque, so
/// references to earlier values stay valid while later nodes are appended.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var self)>;

  /// With grad disabled no closures are stored (inference).
  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  /// Owned value that never receives a gradient.
  Var constant(Tensor<T> value) { return push(std::move(value), nullptr, false); }
  /// Owned value that accumulates a gradient.
  Var leaf(Tensor<T> value) { return push(std::move(value), nullptr, grad_enabled_); }
  /// Borrowed value (e.g. a model parameter); `ref` must outlive the graph.
  Var external(const Tensor<T>& ref, bool requires_grad) {
    Node node;
    node.ext = &ref;
    node.requires_grad = requires_grad && grad_enabled_;
    nodes_.push_back(std::move(node));
    return {static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  const Tensor<T>& value(Var v) const { return node(v).value(); }
  const Shape& shape(Var v) const { return node(v).value().shape; }
  bool requires_grad(Var v) const { return node(v).requires_grad; }

  /// Gradient of the last backward pass (zeros if the node was not reached).
  Tensor<T> grad(Var v) const {
    const Node& n = node(v);
    if (n.grad.data.empty()) return Tensor<T>(n.value().shape);
    return n.grad;
  }
  bool has_grad(Var v) const { return !node(v).grad.data.empty(); }

  /// Zero-initialized on first access. Used by backward closures.
  Tensor<T>& grad_buffer(Var v) {
    Node& n = node(v);
    if (n.grad.data.empty()) n.grad = Tensor<T>(n.value().shape);
    return n.grad;
  }

  /// Records an op output. `fn` is kept only if some input requires grad.
  Var record(Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn fn) {
    bool needs = false;
    if (grad_enabled_)
      for (Var in : inputs)
        if (in.valid() && node(in).requires_grad) needs = true;
    return push(std::move(value), needs ? std::move(fn) : nullptr, needs);
  }

  /// Seeds d(output) = 1 for a single-element output and runs the tape backwards.
  void backward(Var output) {
    if (node(output).value().numel() != 1) throw UsageError("backward: output is not a scalar");
    backward(output, Tensor<T>(node(output).value().shape, T(1)));
  }

  void backward(Var output, const Tensor<T>& seed) {
    if (!grad_enabled_) throw UsageError("backward on a graph built without gradients");
    if (!(seed.shape == node(output).value().shape)) throw UsageError("backward: seed shape mismatch");
    for (Node& n : nodes_) n.grad = Tensor<T>();
    node(output).grad = seed;
    for (std::int32_t i = output.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.backward && !n.grad.data.empty()) n.backward(*this, Var{i});
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> own;
    const Tensor<T>* ext = nullptr;
    Tensor<T> grad;
    BackwardFn backward;
    bool requires_grad = false;

    const Tensor<T>& value() const { return ext ? *ext : own; }
  };

  Var push(Tensor<T> value, BackwardFn fn, bool requires_grad) {
    Node n;
    n.own = std::move(value);
    n.backward = std::move(fn);
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return {static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  Node& node(Var v) {
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) throw UsageError("invalid graph variable");
    return nodes_[static_cast<std::size_t>(v.id)];
  }
  const Node& node(Var v) const {
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) throw UsageError("invalid graph variable");
    return nodes_[static_cast<std::size_t>(v.id)];
  }

  std::deque<Node> nodes_;
  bool grad_enabled_;
};

}  // namespace e2v::nn
