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

/// J = N / D independent by-count reconstructions, the j-th skipping the
/// first j*D events, merged by (timestamp, offset). Requires 1 <= D <= N and
/// D | N.
std::vector<Frame> hfr_synthesize(const events::EventStream& stream, nn::ModelWeights<float>& weights,
                                  const nn::NetworkConfig& config, std::size_t n, std::size_t d,
                                  const PostprocessOptions& post = {});

/// Per-pixel exponential moving average: out_k = (1-s) in_k + s out_{k-1}.
std::vector<Frame> deflicker(const std::vector<Frame>& frames, double strength);

}  // namespace e2v::pipeline
