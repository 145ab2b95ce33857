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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "e2v/nn/graph.hpp"

namespace e2v::nn {

struct GradCheckInput {
  std::string name;
  Tensor<double> value;
  bool differentiable = true;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_input;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  /// Check at most this many randomly chosen entries per input (0 = all).
  std::size_t max_entries_per_input = 0;
  /// Relative error uses max(|analytic|, |numeric|, floor) as denominator,
  /// floor = this fraction of the largest analytic gradient magnitude.
  double relative_floor = 1e-3;
};

/// Builds the op from graph leaves for `inputs` and returns its output.
using GradCheckBuilder = std::function<Var(Graph<double>&, std::span<const Var>)>;

/// Compares reverse-mode gradients of sum(r * op(inputs)), r a fixed random
/// projection, with central differences of step `options.step`.
GradCheckResult gradient_check(const GradCheckBuilder& build, std::vector<GradCheckInput> inputs, std::uint64_t seed,
                               const GradCheckOptions& options = {});

}  // namespace e2v::nn
