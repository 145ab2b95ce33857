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

#include "e2v/pipeline/diagnostics.hpp"

#include <cmath>

#include "e2v/common.hpp"
#include "e2v/events/windowing.hpp"

namespace e2v::pipeline {

std::vector<double> decay_diagnostic(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                                     const events::EventStream& warmup, const WindowPolicy& policy, int steps) {
  if (steps < 0) throw UsageError("decay_diagnostic: steps must be >= 0");
  PostprocessOptions raw;
  raw.enabled = false;
  Reconstructor r(weights, config, policy, raw);
  const std::vector<Frame> frames = reconstruct_stream(warmup, r);
  if (frames.empty()) throw DataError("decay_diagnostic: warmup stream produced no frames");
  Image prev = frames.back().image;
  std::vector<double> report;
  const auto zero = events::EventTensor::zeros(config.input_bins, warmup.height, warmup.width);
  for (int k = 0; k < steps; ++k) {
    Image next = r.step(zero);
    double s = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) s += std::abs(next.data[i] - prev.data[i]);
    report.push_back(s / static_cast<double>(next.size()));
    prev = std::move(next);
  }
  return report;
}

}  // namespace e2v::pipeline
