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

#include "e2v/nn/network.hpp"

namespace e2v::pipeline {

struct BenchOptions {
  int width = 240;
  int height = 180;
  std::size_t events = 10000;  // events per window
  int repeats = 5;
  std::uint64_t seed = 0;
};

/// Mean milliseconds per window for each stage.
struct BenchReport {
  double parse_ms = 0.0;        // text parsing of the window
  double voxelize_ms = 0.0;     // voxel grid + normalization
  double forward_ms = 0.0;      // eval-mode network step
  double postprocess_ms = 0.0;  // percentile normalization
  std::size_t events = 0;
  int repeats = 0;

  double total_ms() const { return parse_ms + voxelize_ms + forward_ms + postprocess_ms; }
  /// Events per second through parse + voxelize alone.
  double ingest_rate() const;
  std::string to_text() const;
};

/// Times every stage on a synthetic window of uniformly random events.
BenchReport run_benchmark(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                          const BenchOptions& options);

}  // namespace e2v::pipeline
