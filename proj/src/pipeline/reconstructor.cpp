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

#include "e2v/pipeline/reconstructor.hpp"

#include <algorithm>
#include <cmath>

#include "e2v/common.hpp"
#include "e2v/events/windowing.hpp"

namespace e2v::pipeline {

WindowPolicy WindowPolicy::by_count(std::size_t n) {
  if (n == 0) throw UsageError("window count must be >= 1");
  WindowPolicy p;
  p.kind = Kind::Count;
  p.count = n;
  return p;
}

WindowPolicy WindowPolicy::by_duration(double tau, std::optional<double> origin) {
  if (!(tau > 0.0)) throw UsageError("window duration must be > 0");
  WindowPolicy p;
  p.kind = Kind::Duration;
  p.duration = tau;
  p.origin = origin;
  return p;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("percentile of an empty set");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  double b = a;
  if (hi != lo) b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(hi), values.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

Image postprocess(const Image& image, const PostprocessOptions& o) {
  if (!o.enabled || image.size() == 0) return image;
  const double m = percentile(image.data, o.low);
  const double M = percentile(image.data, o.high);
  Image out(image.width, image.height, 0.5);
  if (M - m < o.min_spread) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::clamp((image.data[i] - m) / (M - m), 0.0, 1.0);
  return out;
}

Reconstructor::Reconstructor(nn::ModelWeights<float>& weights, nn::NetworkConfig config, WindowPolicy policy,
                             PostprocessOptions post)
    : weights_(&weights), config_(config), policy_(policy), post_(post) {
  config_.validate();
  nn::check_weights(weights, config_);
}

void Reconstructor::reset() { state_ = {}; }

Image Reconstructor::step(const events::EventTensor& tensor) {
  if (tensor.bins != config_.input_bins) throw UsageError("reconstructor: tensor bin count does not match the model");
  nn::Tensor<float> input({1, tensor.bins, tensor.height, tensor.width});
  std::copy(tensor.values.begin(), tensor.values.end(), input.data.begin());
  auto [out, next] = nn::e2vid_forward(input, state_, *weights_, config_, nn::Mode::Eval);
  state_ = std::move(next);
  Image image(tensor.width, tensor.height);
  std::copy(out.data.begin(), out.data.end(), image.data.begin());
  return image;
}

Image Reconstructor::process(const events::EventWindow& window, int width, int height) {
  events::EventTensor t = window.empty() ? events::EventTensor::zeros(config_.input_bins, height, width)
                                         : events::encode_voxel_grid(window, config_.input_bins, height, width);
  events::normalize_tensor(t);
  return postprocess(step(t), post_);
}

std::vector<Frame> reconstruct_stream(const events::EventStream& stream, Reconstructor& r) {
  const WindowPolicy& p = r.policy();
  std::vector<Frame> frames;
  if (p.kind == WindowPolicy::Kind::Count) {
    for (const auto& w : events::window_by_count(stream, p.count))
      frames.push_back({w.t_end, r.process(w, stream.width, stream.height)});
    return frames;
  }
  for (const auto& w : events::window_by_duration(stream, p.duration, p.origin)) {
    if (w.empty() && !p.feed_empty) continue;
    frames.push_back({w.t_end, r.process(w, stream.width, stream.height)});
  }
  return frames;
}

}  // namespace e2v::pipeline
