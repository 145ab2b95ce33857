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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "e2v/nn/ops.hpp"

namespace e2v::nn {

enum class SkipMode { Sum, Concat };

std::string to_string(SkipMode mode);
SkipMode parse_skip_mode(const std::string& text);

struct NetworkConfig {
  int num_encoders = 3;
  int num_residual = 2;
  int base_channels = 32;
  SkipMode skip = SkipMode::Sum;
  int input_bins = 5;
  int unroll = 40;  // training unroll length L
  bool recurrent = true;  // false: every step starts from the zero state
  int head_kernel = 5;

  /// Throws UsageError on out-of-range values.
  void validate() const;
  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Output channels of encoder i (1-based): base * 2^i.
int encoder_channels(const NetworkConfig& config, int i);

/// Learned parameters plus batch-norm running statistics, keyed by stable
/// dotted names (e.g. "encoders.0.lstm.gates.weight").
template <typename T>
struct ModelWeights {
  std::map<std::string, Tensor<T>> params;
  std::map<std::string, Tensor<T>> buffers;

  std::size_t parameter_count() const;
};

template <typename To, typename From>
ModelWeights<To> cast_weights(const ModelWeights<From>& src) {
  ModelWeights<To> out;
  for (const auto& [k, v] : src.params) out.params.emplace(k, tensor_cast<To>(v));
  for (const auto& [k, v] : src.buffers) out.buffers.emplace(k, tensor_cast<To>(v));
  return out;
}

struct ParamSpec {
  std::string key;
  Shape shape;
  bool buffer = false;
};

/// Every parameter and buffer the architecture needs, in key order.
std::vector<ParamSpec> parameter_layout(const NetworkConfig& config);

/// Kaiming-uniform (fan-in, ReLU gain) for feed-forward convolutions,
/// Xavier-uniform for ConvLSTM gate convolutions, forget-gate bias 1, other
/// biases 0, BN scale 1 / shift 0, running mean 0 / var 1.
template <typename T>
ModelWeights<T> init_weights(const NetworkConfig& config, std::uint64_t seed);

/// Throws UsageError naming the first missing key or mismatched shape.
template <typename T>
void check_weights(const ModelWeights<T>& weights, const NetworkConfig& config);

/// Per-encoder ConvLSTM memory. Empty means the zero state.
template <typename T>
struct RecurrentState {
  std::vector<Tensor<T>> hidden;
  std::vector<Tensor<T>> cell;

  bool empty() const { return hidden.empty(); }
};

template <typename T>
struct StateVars {
  std::vector<Var> hidden;
  std::vector<Var> cell;

  bool empty() const { return hidden.empty(); }
};

/// Model parameters bound to a graph. Running statistics stay owned by the
/// weights and are updated in train mode.
template <typename T>
struct BoundModel {
  NetworkConfig config;
  ModelWeights<T>* weights = nullptr;
  std::map<std::string, Var> vars;

  Var operator[](const std::string& key) const;
  BatchNormParams<T> bn(const std::string& prefix) const;
};

/// Adds every parameter as a borrowed graph value (trainable => gradients).
template <typename T>
BoundModel<T> bind_model(Graph<T>& g, ModelWeights<T>& weights, const NetworkConfig& config, bool trainable);

/// c = f * c_prev + i * g, h = o * tanh(c) with [i, f, o, g] from one
/// 3x3 convolution over [x ; h_prev]. Invalid h_prev/c_prev means zeros.
template <typename T>
std::pair<Var, Var> convlstm_step(Graph<T>& g, Var x, Var h_prev, Var c_prev, Var gate_weight, Var gate_bias);

/// relu(bn2(conv2(relu(bn1(conv1(x))))) + x), 3x3 convolutions without bias.
template <typename T>
Var residual_block(Graph<T>& g, Var x, Var conv1, const BatchNormParams<T>& bn1, Var conv2,
                   const BatchNormParams<T>& bn2, Mode mode);

template <typename T>
struct StepOutput {
  Var image;  // [N, 1, H, W], sigmoid output
  StateVars<T> state;
};

/// One recurrent step: head, N_E recurrent encoders, N_R residual blocks,
/// N_E decoders with skip joins, prediction conv + sigmoid.
template <typename T>
StepOutput<T> forward_step(Graph<T>& g, const BoundModel<T>& model, Var input, const StateVars<T>& state, Mode mode);

/// Graph-free forward for inference. `input` is [N, B, H, W].
template <typename T>
std::pair<Tensor<T>, RecurrentState<T>> e2vid_forward(const Tensor<T>& input, const RecurrentState<T>& state,
                                                      ModelWeights<T>& weights, const NetworkConfig& config,
                                                      Mode mode);

}  // namespace e2v::nn
