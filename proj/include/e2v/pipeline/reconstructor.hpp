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

#include <cstddef>
#include <optional>
#include <vector>

#include "e2v/events/voxel_grid.hpp"
#include "e2v/nn/network.hpp"
#include "e2v/pipeline/frame.hpp"

namespace e2v::pipeline {

struct WindowPolicy {
  enum class Kind { Count, Duration };
  Kind kind = Kind::Count;
  std::size_t count = 10000;
  double duration = 0.05;         // s
  std::optional<double> origin;   // duration windows start here (default: first event)
  bool feed_empty = true;         // empty duration windows run as zero tensors

  static WindowPolicy by_count(std::size_t n);
  static WindowPolicy by_duration(double tau, std::optional<double> origin = std::nullopt);
};

struct PostprocessOptions {
  bool enabled = true;
  double low = 0.01;
  double high = 0.99;
  double min_spread = 1e-3;
};

/// Value at quantile q in [0,1], linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

/// clip((I - m) / (M - m), 0, 1) with m, M the low/high percentiles; a
/// constant 0.5 image when M - m < min_spread.
Image postprocess(const Image& image, const PostprocessOptions& options = {});

/// Stateful stream reconstruction with one model. Borrowed weights must
/// outlive the reconstructor; they are only read, so several reconstructors
/// may share them across threads.
class Reconstructor {
 public:
  Reconstructor(nn::ModelWeights<float>& weights, nn::NetworkConfig config, WindowPolicy policy = {},
                PostprocessOptions post = {});

  /// Back to the zero state.
  void reset();
  /// One network step on an already normalized tensor; returns the raw
  /// sigmoid output and advances the state.
  Image step(const events::EventTensor& tensor);
  /// Encodes, normalizes, steps and post-processes one window.
  Image process(const events::EventWindow& window, int width, int height);

  const WindowPolicy& policy() const { return policy_; }
  const nn::NetworkConfig& config() const { return config_; }

 private:
  nn::ModelWeights<float>* weights_;
  nn::NetworkConfig config_;
  WindowPolicy policy_;
  PostprocessOptions post_;
  nn::RecurrentState<float> state_;
};

/// Windows the stream per the reconstructor's policy and emits one frame per
/// processed window, threading the state. Timestamps: last event of the
/// window (count) or window end (duration).
std::vector<Frame> reconstruct_stream(const events::EventStream& stream, Reconstructor& reconstructor);

}  // namespace e2v::pipeline
