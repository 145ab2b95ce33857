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

#include "e2v/train/gradcheck_suite.hpp"

#include <memory>
#include <random>

#include "e2v/losses/losses.hpp"
#include "e2v/nn/network.hpp"
#include "e2v/nn/ops.hpp"

namespace e2v::train {

namespace {

using nn::Graph;
using nn::GradCheckInput;
using nn::Shape;
using nn::Tensor;
using nn::Var;

Tensor<double> random_tensor(std::mt19937_64& rng, Shape s, double scale = 1.0, double offset = 0.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor<double> t(s);
  for (double& v : t.data) v = offset + scale * n(rng);
  return t;
}

Tensor<double> uniform_tensor(std::mt19937_64& rng, Shape s, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<double> t(s);
  for (double& v : t.data) v = u(rng);
  return t;
}

FlowField random_flow(std::mt19937_64& rng, int w, int h, double magnitude) {
  std::uniform_real_distribution<double> u(-magnitude, magnitude);
  FlowField f(w, h);
  for (std::size_t i = 0; i < f.dx.size(); ++i) {
    f.dx[i] = u(rng);
    f.dy[i] = u(rng);
  }
  return f;
}

}  // namespace

std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed, std::size_t max_entries) {
  std::mt19937_64 rng(seed);
  nn::GradCheckOptions opt;
  opt.max_entries_per_input = max_entries;
  std::vector<GradCheckCase> out;
  auto check = [&](std::string name, double threshold, const nn::GradCheckBuilder& build,
                   std::vector<GradCheckInput> inputs) {
    out.push_back({std::move(name), threshold, nn::gradient_check(build, std::move(inputs), rng(), opt)});
  };

  check("conv2d", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) { return nn::conv2d(g, v[0], v[1], v[2], 1, 1); },
        {{"x", random_tensor(rng, {1, 3, 8, 8})},
         {"weight", random_tensor(rng, {4, 3, 3, 3}, 0.3)},
         {"bias", random_tensor(rng, {1, 4, 1, 1}, 0.1)}});
  check("conv2d_stride2", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) { return nn::conv2d(g, v[0], v[1], Var{}, 2, 2); },
        {{"x", random_tensor(rng, {2, 2, 7, 9})}, {"weight", random_tensor(rng, {3, 2, 5, 5}, 0.2)}});

  check("batch_norm", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) {
          static thread_local Tensor<double> mean, var;
          mean = Tensor<double>({1, 3, 1, 1});
          var = Tensor<double>({1, 3, 1, 1}, 1.0);
          return nn::batch_norm(g, v[0], {v[1], v[2], &mean, &var}, nn::Mode::Train);
        },
        {{"x", random_tensor(rng, {2, 3, 4, 5}, 1.5, 0.3)},
         {"gamma", random_tensor(rng, {1, 3, 1, 1}, 0.5, 1.0)},
         {"beta", random_tensor(rng, {1, 3, 1, 1}, 0.5)}});

  check("upsample_bilinear2x", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) { return nn::upsample_bilinear2x(g, v[0]); },
        {{"x", random_tensor(rng, {1, 2, 4, 5})}});

  check("convlstm_3steps", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) {
          Var h, c;
          Var last;
          for (int t = 0; t < 3; ++t) {
            auto [hn, cn] = nn::convlstm_step(g, v[static_cast<std::size_t>(t)], h, c, v[3], v[4]);
            h = hn;
            c = cn;
          }
          return nn::concat_channels(g, h, c);
        },
        {{"x0", random_tensor(rng, {1, 3, 5, 5})},
         {"x1", random_tensor(rng, {1, 3, 5, 5})},
         {"x2", random_tensor(rng, {1, 3, 5, 5})},
         {"gates.weight", random_tensor(rng, {12, 6, 3, 3}, 0.25)},
         {"gates.bias", random_tensor(rng, {1, 12, 1, 1}, 0.2)}});

  check("residual_block", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) {
          static thread_local Tensor<double> m1, v1, m2, v2;
          m1 = m2 = Tensor<double>({1, 4, 1, 1});
          v1 = v2 = Tensor<double>({1, 4, 1, 1}, 1.0);
          return nn::residual_block(g, v[0], v[1], {v[2], v[3], &m1, &v1}, v[4], {v[5], v[6], &m2, &v2},
                                    nn::Mode::Train);
        },
        {{"x", random_tensor(rng, {2, 4, 5, 5})},
         {"conv1", random_tensor(rng, {4, 4, 3, 3}, 0.3)},
         {"bn1.gamma", random_tensor(rng, {1, 4, 1, 1}, 0.3, 1.0)},
         {"bn1.beta", random_tensor(rng, {1, 4, 1, 1}, 0.3)},
         {"conv2", random_tensor(rng, {4, 4, 3, 3}, 0.3)},
         {"bn2.gamma", random_tensor(rng, {1, 4, 1, 1}, 0.3, 1.0)},
         {"bn2.beta", random_tensor(rng, {1, 4, 1, 1}, 0.3)}});

  const FlowField flow = random_flow(rng, 8, 8, 2.5);
  check("backward_warp", 1e-4,
        [flow](Graph<double>& g, std::span<const Var> v) {
          return losses::backward_warp(g, v[0], std::span<const FlowField>(&flow, 1));
        },
        {{"image", random_tensor(rng, {1, 1, 8, 8})}});

  Tensor<double> mask = uniform_tensor(rng, {1, 1, 8, 8}, 0.1, 1.0);
  check("temporal_loss", 1e-4,
        [flow, mask](Graph<double>& g, std::span<const Var> v) {
          return losses::temporal_loss(g, v[0], v[1], std::span<const FlowField>(&flow, 1), mask);
        },
        {{"current", uniform_tensor(rng, {1, 1, 8, 8}, 0.0, 1.0)},
         {"previous", uniform_tensor(rng, {1, 1, 8, 8}, 0.0, 1.0)}});
  check("reconstruction_l1", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) {
          return losses::reconstruction_loss(g, v[0], v[1], losses::ReconstructionKind::L1);
        },
        {{"prediction", uniform_tensor(rng, {2, 1, 6, 6}, 0.0, 1.0)},
         {"target", uniform_tensor(rng, {2, 1, 6, 6}, 0.0, 1.0), false}});
  check("reconstruction_mse", 1e-4,
        [](Graph<double>& g, std::span<const Var> v) {
          return losses::reconstruction_loss(g, v[0], v[1], losses::ReconstructionKind::MSE);
        },
        {{"prediction", uniform_tensor(rng, {2, 1, 6, 6}, 0.0, 1.0)},
         {"target", uniform_tensor(rng, {2, 1, 6, 6}, 0.0, 1.0), false}});

  for (nn::SkipMode skip : {nn::SkipMode::Sum, nn::SkipMode::Concat}) {
    nn::NetworkConfig cfg;
    cfg.num_encoders = 2;
    cfg.num_residual = 1;
    cfg.base_channels = 4;
    cfg.input_bins = 5;
    cfg.skip = skip;
    auto weights = std::make_shared<nn::ModelWeights<double>>(nn::init_weights<double>(cfg, rng()));
    std::vector<GradCheckInput> inputs;
    std::vector<std::string> keys;
    for (const auto& [key, t] : weights->params) {
      keys.push_back(key);
      // Move BN affine terms and biases off their init values.
      Tensor<double> value = t;
      if (key.find(".bn") != std::string::npos || key.find("bias") != std::string::npos)
        for (double& x : value.data) x += 0.1 * std::normal_distribution<double>(0.0, 1.0)(rng);
      inputs.push_back({key, value});
    }
    inputs.push_back({"input0", random_tensor(rng, {1, 5, 16, 16})});
    inputs.push_back({"input1", random_tensor(rng, {1, 5, 16, 16})});
    check(std::string("network_2steps_") + nn::to_string(skip), 1e-3,
          [cfg, weights, keys](Graph<double>& g, std::span<const Var> v) {
            nn::BoundModel<double> model;
            model.config = cfg;
            model.weights = weights.get();
            for (std::size_t i = 0; i < keys.size(); ++i) model.vars.emplace(keys[i], v[i]);
            nn::StateVars<double> state;
            const auto s0 = nn::forward_step(g, model, v[keys.size()], state, nn::Mode::Train);
            const auto s1 = nn::forward_step(g, model, v[keys.size() + 1], s0.state, nn::Mode::Train);
            return nn::concat_channels(g, s0.image, s1.image);
          },
          std::move(inputs));
  }
  return out;
}

}  // namespace e2v::train
