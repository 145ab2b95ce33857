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

#include "e2v/nn/network.hpp"

#include <cmath>
#include <random>

namespace e2v::nn {

std::string to_string(SkipMode mode) { return mode == SkipMode::Sum ? "sum" : "concat"; }

SkipMode parse_skip_mode(const std::string& text) {
  if (text == "sum") return SkipMode::Sum;
  if (text == "concat") return SkipMode::Concat;
  throw UsageError("skip mode must be \"sum\" or \"concat\", got \"" + text + "\"");
}

void NetworkConfig::validate() const {
  if (num_encoders < 1 || num_encoders > 8) throw UsageError("num_encoders must be in [1, 8]");
  if (num_residual < 0) throw UsageError("num_residual must be >= 0");
  if (base_channels < 1) throw UsageError("base_channels must be >= 1");
  if (input_bins < 1) throw UsageError("input_bins must be >= 1");
  if (unroll < 1) throw UsageError("unroll must be >= 1");
  if (head_kernel < 1 || head_kernel % 2 == 0) throw UsageError("head_kernel must be odd and positive");
}

int encoder_channels(const NetworkConfig& config, int i) { return config.base_channels << i; }

template <typename T>
std::size_t ModelWeights<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [k, v] : params) n += v.numel();
  return n;
}

namespace {

constexpr int kDownKernel = 5;
constexpr int kGateKernel = 3;
constexpr int kResidualKernel = 3;
constexpr int kDecoderKernel = 5;
constexpr int kPredictionKernel = 5;

void add_bn(std::vector<ParamSpec>& out, const std::string& prefix, int channels) {
  out.push_back({prefix + ".weight", Shape{1, channels, 1, 1}, false});
  out.push_back({prefix + ".bias", Shape{1, channels, 1, 1}, false});
  out.push_back({prefix + ".running_mean", Shape{1, channels, 1, 1}, true});
  out.push_back({prefix + ".running_var", Shape{1, channels, 1, 1}, true});
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<ParamSpec> parameter_layout(const NetworkConfig& config) {
  config.validate();
  std::vector<ParamSpec> out;
  const int nb = config.base_channels;
  const int k = config.head_kernel;
  out.push_back({"head.conv.weight", Shape{nb, config.input_bins, k, k}, false});
  add_bn(out, "head.bn", nb);
  for (int i = 0; i < config.num_encoders; ++i) {
    const int cin = encoder_channels(config, i), cout = encoder_channels(config, i + 1);
    const std::string p = "encoders." + std::to_string(i);
    out.push_back({p + ".down.weight", Shape{cout, cin, kDownKernel, kDownKernel}, false});
    add_bn(out, p + ".bn", cout);
    out.push_back({p + ".lstm.gates.weight", Shape{4 * cout, 2 * cout, kGateKernel, kGateKernel}, false});
    out.push_back({p + ".lstm.gates.bias", Shape{1, 4 * cout, 1, 1}, false});
  }
  const int deepest = encoder_channels(config, config.num_encoders);
  for (int j = 0; j < config.num_residual; ++j) {
    const std::string p = "resblocks." + std::to_string(j);
    out.push_back({p + ".conv1.weight", Shape{deepest, deepest, kResidualKernel, kResidualKernel}, false});
    add_bn(out, p + ".bn1", deepest);
    out.push_back({p + ".conv2.weight", Shape{deepest, deepest, kResidualKernel, kResidualKernel}, false});
    add_bn(out, p + ".bn2", deepest);
  }
  const int join = config.skip == SkipMode::Concat ? 2 : 1;
  for (int l = 0; l < config.num_encoders; ++l) {
    const int cin = encoder_channels(config, config.num_encoders - l) * join;
    const int cout = encoder_channels(config, config.num_encoders - l - 1);
    const std::string p = "decoders." + std::to_string(l);
    out.push_back({p + ".conv.weight", Shape{cout, cin, kDecoderKernel, kDecoderKernel}, false});
    add_bn(out, p + ".bn", cout);
  }
  out.push_back({"pred.conv.weight", Shape{1, nb * join, kPredictionKernel, kPredictionKernel}, false});
  out.push_back({"pred.conv.bias", Shape{1, 1, 1, 1}, false});
  return out;
}

template <typename T>
ModelWeights<T> init_weights(const NetworkConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelWeights<T> w;
  for (const ParamSpec& spec : parameter_layout(config)) {
    Tensor<T> t(spec.shape);
    const std::string& key = spec.key;
    if (spec.buffer) {
      if (ends_with(key, "running_var")) std::fill(t.data.begin(), t.data.end(), T(1));
      w.buffers.emplace(key, std::move(t));
      continue;
    }
    if (ends_with(key, "conv.weight") || ends_with(key, "down.weight") || ends_with(key, "conv1.weight") ||
        ends_with(key, "conv2.weight") || ends_with(key, "gates.weight")) {
      const double fan_in = static_cast<double>(spec.shape.c) * spec.shape.h * spec.shape.w;
      const double fan_out = static_cast<double>(spec.shape.n) * spec.shape.h * spec.shape.w;
      const double bound = ends_with(key, "gates.weight") ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
      std::uniform_real_distribution<double> u(-bound, bound);
      for (T& v : t.data) v = static_cast<T>(u(rng));
    } else if (ends_with(key, "gates.bias")) {
      // gate order i, f, o, g: forget-gate bias 1
      const int c = spec.shape.c / 4;
      for (int i = c; i < 2 * c; ++i) t.data[i] = T(1);
    } else if (ends_with(key, "bn.weight") || ends_with(key, "bn1.weight") || ends_with(key, "bn2.weight")) {
      std::fill(t.data.begin(), t.data.end(), T(1));
    }
    w.params.emplace(key, std::move(t));
  }
  return w;
}

template <typename T>
void check_weights(const ModelWeights<T>& weights, const NetworkConfig& config) {
  std::size_t params = 0, buffers = 0;
  for (const ParamSpec& spec : parameter_layout(config)) {
    const auto& map = spec.buffer ? weights.buffers : weights.params;
    const auto it = map.find(spec.key);
    if (it == map.end()) throw UsageError("weights: missing key \"" + spec.key + "\"");
    if (!(it->second.shape == spec.shape))
      throw UsageError("weights: key \"" + spec.key + "\" has shape " + it->second.shape.str() + ", expected " +
                       spec.shape.str());
    ++(spec.buffer ? buffers : params);
  }
  if (params != weights.params.size() || buffers != weights.buffers.size())
    throw UsageError("weights: unexpected extra keys for this configuration");
}

template <typename T>
Var BoundModel<T>::operator[](const std::string& key) const {
  const auto it = vars.find(key);
  if (it == vars.end()) throw UsageError("model: missing parameter \"" + key + "\"");
  return it->second;
}

template <typename T>
BatchNormParams<T> BoundModel<T>::bn(const std::string& prefix) const {
  BatchNormParams<T> p;
  p.gamma = (*this)[prefix + ".weight"];
  p.beta = (*this)[prefix + ".bias"];
  p.running_mean = &weights->buffers.at(prefix + ".running_mean");
  p.running_var = &weights->buffers.at(prefix + ".running_var");
  return p;
}

template <typename T>
BoundModel<T> bind_model(Graph<T>& g, ModelWeights<T>& weights, const NetworkConfig& config, bool trainable) {
  check_weights(weights, config);
  BoundModel<T> m;
  m.config = config;
  m.weights = &weights;
  for (auto& [key, tensor] : weights.params) m.vars.emplace(key, g.external(tensor, trainable));
  return m;
}

template <typename T>
std::pair<Var, Var> convlstm_step(Graph<T>& g, Var x, Var h_prev, Var c_prev, Var gate_weight, Var gate_bias) {
  const Shape xs = g.shape(x);
  if (!h_prev.valid()) h_prev = g.constant(Tensor<T>(xs));
  if (!c_prev.valid()) c_prev = g.constant(Tensor<T>(xs));
  if (!(g.shape(h_prev) == xs) || !(g.shape(c_prev) == xs))
    throw UsageError("convlstm: state shape " + g.shape(h_prev).str() + " does not match input " + xs.str());
  const int c = xs.c;
  const Var gates = conv2d(g, concat_channels(g, x, h_prev), gate_weight, gate_bias, 1, kGateKernel / 2);
  const Var in_gate = sigmoid(g, slice_channels(g, gates, 0, c));
  const Var forget_gate = sigmoid(g, slice_channels(g, gates, c, c));
  const Var out_gate = sigmoid(g, slice_channels(g, gates, 2 * c, c));
  const Var cell_input = tanh(g, slice_channels(g, gates, 3 * c, c));
  const Var cell = add(g, mul(g, forget_gate, c_prev), mul(g, in_gate, cell_input));
  const Var hidden = mul(g, out_gate, tanh(g, cell));
  return {hidden, cell};
}

template <typename T>
Var residual_block(Graph<T>& g, Var x, Var conv1, const BatchNormParams<T>& bn1, Var conv2,
                   const BatchNormParams<T>& bn2, Mode mode) {
  const Var a = relu(g, batch_norm(g, conv2d(g, x, conv1, Var{}, 1, kResidualKernel / 2), bn1, mode));
  const Var b = batch_norm(g, conv2d(g, a, conv2, Var{}, 1, kResidualKernel / 2), bn2, mode);
  return relu(g, add(g, b, x));
}

namespace {

template <typename T>
Var skip_join(Graph<T>& g, Var upper, Var skip, SkipMode mode) {
  const Shape s = g.shape(skip);
  upper = crop(g, upper, s.h, s.w);
  return mode == SkipMode::Sum ? add(g, upper, skip) : concat_channels(g, upper, skip);
}

}  // namespace

template <typename T>
StepOutput<T> forward_step(Graph<T>& g, const BoundModel<T>& model, Var input, const StateVars<T>& state, Mode mode) {
  const NetworkConfig& cfg = model.config;
  const Shape in = g.shape(input);
  if (in.c != cfg.input_bins)
    throw UsageError("forward: input has " + std::to_string(in.c) + " bins, model expects " +
                     std::to_string(cfg.input_bins));
  const bool use_state = cfg.recurrent && !state.empty();
  if (use_state && (state.hidden.size() != static_cast<std::size_t>(cfg.num_encoders) ||
                    state.cell.size() != static_cast<std::size_t>(cfg.num_encoders)))
    throw UsageError("forward: recurrent state has the wrong number of encoders");

  const Var head = relu(g, batch_norm(g, conv2d(g, input, model["head.conv.weight"], Var{}, 1, cfg.head_kernel / 2),
                                      model.bn("head.bn"), mode));
  std::vector<Var> skips{head};
  StepOutput<T> out;
  Var x = head;
  for (int i = 0; i < cfg.num_encoders; ++i) {
    const std::string p = "encoders." + std::to_string(i);
    x = relu(g, batch_norm(g, conv2d(g, x, model[p + ".down.weight"], Var{}, 2, kDownKernel / 2), model.bn(p + ".bn"),
                           mode));
    const Var h_prev = use_state ? state.hidden[i] : Var{};
    const Var c_prev = use_state ? state.cell[i] : Var{};
    auto [h, c] = convlstm_step(g, x, h_prev, c_prev, model[p + ".lstm.gates.weight"], model[p + ".lstm.gates.bias"]);
    out.state.hidden.push_back(h);
    out.state.cell.push_back(c);
    skips.push_back(h);
    x = h;
  }
  for (int j = 0; j < cfg.num_residual; ++j) {
    const std::string p = "resblocks." + std::to_string(j);
    x = residual_block(g, x, model[p + ".conv1.weight"], model.bn(p + ".bn1"), model[p + ".conv2.weight"],
                       model.bn(p + ".bn2"), mode);
  }
  for (int l = 0; l < cfg.num_encoders; ++l) {
    const std::string p = "decoders." + std::to_string(l);
    x = skip_join(g, x, skips[static_cast<std::size_t>(cfg.num_encoders - l)], cfg.skip);
    x = upsample_bilinear2x(g, x);
    x = relu(g, batch_norm(g, conv2d(g, x, model[p + ".conv.weight"], Var{}, 1, kDecoderKernel / 2),
                           model.bn(p + ".bn"), mode));
  }
  x = skip_join(g, x, head, cfg.skip);
  out.image = sigmoid(g, conv2d(g, x, model["pred.conv.weight"], model["pred.conv.bias"], 1, kPredictionKernel / 2));
  return out;
}

template <typename T>
std::pair<Tensor<T>, RecurrentState<T>> e2vid_forward(const Tensor<T>& input, const RecurrentState<T>& state,
                                                      ModelWeights<T>& weights, const NetworkConfig& config,
                                                      Mode mode) {
  Graph<T> g(false);
  const BoundModel<T> model = bind_model(g, weights, config, false);
  StateVars<T> sv;
  if (!state.empty()) {
    if (state.hidden.size() != state.cell.size()) throw UsageError("forward: malformed recurrent state");
    for (std::size_t i = 0; i < state.hidden.size(); ++i) {
      sv.hidden.push_back(g.external(state.hidden[i], false));
      sv.cell.push_back(g.external(state.cell[i], false));
    }
  }
  const StepOutput<T> step = forward_step(g, model, g.external(input, false), sv, mode);
  RecurrentState<T> next;
  if (config.recurrent) {
    for (std::size_t i = 0; i < step.state.hidden.size(); ++i) {
      next.hidden.push_back(g.value(step.state.hidden[i]));
      next.cell.push_back(g.value(step.state.cell[i]));
    }
  }
  return {g.value(step.image), std::move(next)};
}

#define E2V_INSTANTIATE_NETWORK(T)                                                                              \
  template struct ModelWeights<T>;                                                                              \
  template struct BoundModel<T>;                                                                                \
  template ModelWeights<T> init_weights<T>(const NetworkConfig&, std::uint64_t);                                \
  template void check_weights<T>(const ModelWeights<T>&, const NetworkConfig&);                                 \
  template BoundModel<T> bind_model<T>(Graph<T>&, ModelWeights<T>&, const NetworkConfig&, bool);                \
  template std::pair<Var, Var> convlstm_step<T>(Graph<T>&, Var, Var, Var, Var, Var);                            \
  template Var residual_block<T>(Graph<T>&, Var, Var, const BatchNormParams<T>&, Var, const BatchNormParams<T>&, \
                                 Mode);                                                                         \
  template StepOutput<T> forward_step<T>(Graph<T>&, const BoundModel<T>&, Var, const StateVars<T>&, Mode);      \
  template std::pair<Tensor<T>, RecurrentState<T>> e2vid_forward<T>(const Tensor<T>&, const RecurrentState<T>&, \
                                                                    ModelWeights<T>&, const NetworkConfig&, Mode);

E2V_INSTANTIATE_NETWORK(float)
E2V_INSTANTIATE_NETWORK(double)

}  // namespace e2v::nn
