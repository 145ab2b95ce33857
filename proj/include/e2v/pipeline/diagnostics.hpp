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

#include <vector>

#include "e2v/pipeline/reconstructor.hpp"

namespace e2v::pipeline {

/// Runs the warmup stream through a fresh state, then feeds `steps` all-zero
/// tensors and reports the mean absolute change of the raw output per step.
std::vector<double> decay_diagnostic(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                                     const events::EventStream& warmup, const WindowPolicy& policy, int steps);

}  // namespace e2v::pipeline
