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

#include "e2v/nn/adam.hpp"

#include <cmath>

namespace e2v::nn {

template <typename T>
void adam_step(std::map<std::string, Tensor<T>>& params, const std::map<std::string, Tensor<T>>& grads,
               AdamState<T>& state, const AdamOptions& options) {
  if (grads.size() != params.size()) throw UsageError("adam: gradient and parameter key sets differ");
  for (const auto& [key, p] : params) {
    const auto it = grads.find(key);
    if (it == grads.end()) throw UsageError("adam: no gradient for \"" + key + "\"");
    if (!(it->second.shape == p.shape)) throw UsageError("adam: gradient shape mismatch for \"" + key + "\"");
    for (T v : it->second.data)
      if (!std::isfinite(v)) throw NumericError("adam: non-finite gradient in \"" + key + "\"");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  for (auto& [key, p] : params) {
    const Tensor<T>& g = grads.at(key);
    auto [mit, m_new] = state.m.try_emplace(key, Tensor<T>(p.shape));
    auto [vit, v_new] = state.v.try_emplace(key, Tensor<T>(p.shape));
    Tensor<T>& m = mit->second;
    Tensor<T>& v = vit->second;
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double gi = g.data[i];
      const double mi = options.beta1 * m.data[i] + (1.0 - options.beta1) * gi;
      const double vi = options.beta2 * v.data[i] + (1.0 - options.beta2) * gi * gi;
      m.data[i] = static_cast<T>(mi);
      v.data[i] = static_cast<T>(vi);
      const double update = options.lr * (mi / bc1) / (std::sqrt(vi / bc2) + options.eps);
      p.data[i] = static_cast<T>(p.data[i] - update);
    }
  }
}

template void adam_step<float>(std::map<std::string, Tensor<float>>&, const std::map<std::string, Tensor<float>>&,
                               AdamState<float>&, const AdamOptions&);
template void adam_step<double>(std::map<std::string, Tensor<double>>&, const std::map<std::string, Tensor<double>>&,
                                AdamState<double>&, const AdamOptions&);

}  // namespace e2v::nn
