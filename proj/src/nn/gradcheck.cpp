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

#include "e2v/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "e2v/nn/ops.hpp"

namespace e2v::nn {
namespace {

struct Evaluated {
  double value;
  std::vector<Tensor<double>> grads;
};

Evaluated evaluate(const GradCheckBuilder& build, const std::vector<GradCheckInput>& inputs,
                   const Tensor<double>* projection, bool with_grad, Tensor<double>* projection_out,
                   std::mt19937_64* rng) {
  Graph<double> g(with_grad);
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const auto& in : inputs) vars.push_back(in.differentiable ? g.leaf(in.value) : g.constant(in.value));
  const Var out = build(g, vars);
  if (projection_out) {
    Tensor<double> r(g.shape(out));
    std::normal_distribution<double> n(0.0, 1.0);
    for (double& v : r.data) v = n(*rng);
    *projection_out = r;
    projection = projection_out;
  }
  const Var loss = weighted_sum(g, out, *projection);
  Evaluated e{g.value(loss).data[0], {}};
  if (with_grad) {
    g.backward(loss);
    for (Var v : vars) e.grads.push_back(g.grad(v));
  }
  return e;
}

}  // namespace

GradCheckResult gradient_check(const GradCheckBuilder& build, std::vector<GradCheckInput> inputs, std::uint64_t seed,
                               const GradCheckOptions& options) {
  std::mt19937_64 rng(seed);
  Tensor<double> projection;
  const Evaluated base = evaluate(build, inputs, nullptr, true, &projection, &rng);

  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (!inputs[k].differentiable) continue;
    const Tensor<double>& analytic = base.grads[k];
    double max_abs = 0.0;
    for (double v : analytic.data) max_abs = std::max(max_abs, std::abs(v));
    const double floor = std::max(options.relative_floor * max_abs, 1e-10);

    std::vector<std::size_t> entries(inputs[k].value.numel());
    std::iota(entries.begin(), entries.end(), 0);
    if (options.max_entries_per_input > 0 && entries.size() > options.max_entries_per_input) {
      std::shuffle(entries.begin(), entries.end(), rng);
      entries.resize(options.max_entries_per_input);
    }
    for (std::size_t idx : entries) {
      const double original = inputs[k].value.data[idx];
      inputs[k].value.data[idx] = original + options.step;
      const double plus = evaluate(build, inputs, &projection, false, nullptr, nullptr).value;
      inputs[k].value.data[idx] = original - options.step;
      const double minus = evaluate(build, inputs, &projection, false, nullptr, nullptr).value;
      inputs[k].value.data[idx] = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic.data[idx];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++result.entries_checked;
      if (result.entries_checked == 1 || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_input = inputs[k].name;
        result.worst_index = idx;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace e2v::nn
