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
#include <string>
#include <vector>

#include "e2v/nn/gradcheck.hpp"

namespace e2v::train {

struct GradCheckCase {
  std::string name;
  double threshold = 1e-4;
  nn::GradCheckResult result;

  bool passed() const { return result.max_rel_error < threshold; }
};

/// Finite-difference checks of every differentiable layer, the losses and a
/// tiny two-step unrolled network, at 64-bit precision.
/// `max_entries` bounds the entries probed per input tensor (0 = all).
std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed, std::size_t max_entries = 24);

}  // namespace e2v::train
