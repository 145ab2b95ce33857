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

#include "e2v/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "e2v/common.hpp"
#include "e2v/sim/texture.hpp"

namespace e2v::sim {

ContrastThresholds sample_thresholds(std::mt19937_64& rng, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  ContrastThresholds c;
  c.c_pos = std::max(kThresholdFloor, dist(rng));
  c.c_neg = std::max(kThresholdFloor, dist(rng));
  return c;
}

Image render_frame(const Image& texture, const Homography& h, int width, int height) {
  if (width <= 0 || height <= 0) throw UsageError("render_frame: invalid sensor size");
  const Homography inv = h.inverse();
  const double ox = (texture.width - width) / 2;
  const double oy = (texture.height - height) / 2;
  Image out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const auto [u, v] = inv.apply(x, y);
      out.at(x, y) = std::clamp(texture.sample_clamped(u + ox, v + oy), 0.0, 1.0);
    }
  return out;
}

FlowField gt_flow(const Homography& h_prev, const Homography& h_next, int width, int height) {
  const Homography map = h_prev * h_next.inverse();
  if (!h_prev.invertible()) throw UsageError("gt_flow: singular homography");
  FlowField flow(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const auto [px, py] = map.apply(x, y);
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      flow.dx[i] = px - x;
      flow.dy[i] = py - y;
    }
  return flow;
}

double log_intensity(double intensity) { return std::log(intensity + kLogEps); }

EventGenerator::EventGenerator(int width, int height, ContrastThresholds thresholds)
    : width_(width), height_(height), c_(thresholds) {
  if (width <= 0 || height <= 0) throw UsageError("EventGenerator: invalid sensor size");
  if (!(c_.c_pos > 0.0) || !(c_.c_neg > 0.0)) throw UsageError("EventGenerator: thresholds must be positive");
}

void EventGenerator::reset(const Image& log_frame, double t) {
  if (log_frame.width != width_ || log_frame.height != height_) throw UsageError("EventGenerator: frame size");
  last_ = log_frame.data;
  reference_ = log_frame.data;
  t_last_ = t;
  initialized_ = true;
}

void EventGenerator::advance(const Image& log_frame, double t, std::vector<events::Event>& out) {
  if (!initialized_) {
    reset(log_frame, t);
    return;
  }
  if (log_frame.width != width_ || log_frame.height != height_) throw UsageError("EventGenerator: frame size");
  if (!(t > t_last_)) throw UsageError("EventGenerator: timestamps must strictly increase");
  const double dt = t - t_last_;
  const std::size_t first = out.size();
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
      const double l0 = last_[i];
      const double l1 = log_frame.data[i];
      double& ref = reference_[i];
      if (l1 > l0) {
        for (double level = ref + c_.c_pos; level <= l1; level = ref + c_.c_pos) {
          const double te = t_last_ + (level - l0) / (l1 - l0) * dt;
          out.push_back({te, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), 1});
          ref = level;
        }
      } else if (l1 < l0) {
        for (double level = ref - c_.c_neg; level >= l1; level = ref - c_.c_neg) {
          const double te = t_last_ + (level - l0) / (l1 - l0) * dt;
          out.push_back({te, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), -1});
          ref = level;
        }
      }
    }
  std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                   [](const events::Event& a, const events::Event& b) { return a.t < b.t; });
  last_ = log_frame.data;
  t_last_ = t;
}

events::EventStream generate_events_from_log(std::span<const Image> log_frames, std::span<const double> timestamps,
                                             ContrastThresholds thresholds) {
  if (log_frames.size() < 2) throw UsageError("generate_events: need at least 2 frames");
  if (log_frames.size() != timestamps.size()) throw UsageError("generate_events: frame/timestamp count mismatch");
  for (std::size_t k = 1; k < timestamps.size(); ++k)
    if (!(timestamps[k] > timestamps[k - 1])) throw UsageError("generate_events: timestamps must strictly increase");
  events::EventStream stream;
  stream.width = log_frames[0].width;
  stream.height = log_frames[0].height;
  EventGenerator gen(stream.width, stream.height, thresholds);
  gen.reset(log_frames[0], timestamps[0]);
  for (std::size_t k = 1; k < log_frames.size(); ++k) gen.advance(log_frames[k], timestamps[k], stream.events);
  return stream;
}

events::EventStream generate_events(std::span<const Image> frames, std::span<const double> timestamps,
                                    ContrastThresholds thresholds) {
  std::vector<Image> logs(frames.begin(), frames.end());
  for (Image& f : logs)
    for (double& v : f.data) v = log_intensity(v);
  return generate_events_from_log(logs, timestamps, thresholds);
}

namespace {

Image to_log(Image img) {
  for (double& v : img.data) v = log_intensity(v);
  return img;
}

}  // namespace

SimSequence simulate_sequence(const SimConfig& config, const Image& texture, const Trajectory& trajectory,
                              ContrastThresholds thresholds) {
  if (config.width <= 0 || config.height <= 0) throw UsageError("simulate: sensor size must be positive");
  if (!(config.duration > 0.0) || !(config.f_gt > 0.0)) throw UsageError("simulate: duration and f_gt must be > 0");
  if (config.f_sim < 10.0 * config.f_gt) throw UsageError("simulate: f_sim must be >= 10 * f_gt");
  const auto n_frames = static_cast<int>(std::lround(config.duration * config.f_gt));
  if (n_frames < 2) throw UsageError("simulate: sequence shorter than two ground-truth frames");

  SimSequence seq;
  seq.config = config;
  seq.config.texture.reset();
  seq.thresholds = thresholds;
  for (int k = 0; k < n_frames; ++k) {
    const double t = k / config.f_gt;
    seq.frame_times.push_back(t);
    seq.frames.push_back(render_frame(texture, trajectory.at(t), config.width, config.height));
    if (k > 0)
      seq.flows.push_back(gt_flow(trajectory.at(seq.frame_times[k - 1]), trajectory.at(t), config.width,
                                  config.height));
  }

  const double t_end = seq.frame_times.back();
  const auto n_sim = static_cast<int>(std::ceil(t_end * config.f_sim - 1e-9));
  seq.events.width = config.width;
  seq.events.height = config.height;
  EventGenerator gen(config.width, config.height, thresholds);
  gen.reset(to_log(seq.frames.front()), 0.0);
  for (int j = 1; j <= n_sim; ++j) {
    const double t = j == n_sim ? t_end : t_end * j / n_sim;
    gen.advance(to_log(render_frame(texture, trajectory.at(t), config.width, config.height)), t, seq.events.events);
  }
  return seq;
}

SimSequence simulate_sequence(const SimConfig& config) {
  std::mt19937_64 rng(config.seed);
  const ContrastThresholds thresholds = sample_thresholds(rng);
  const Trajectory trajectory = Trajectory::random(rng, config.duration, config.width, config.height,
                                                   config.motion_scale);
  Image texture;
  if (config.texture) {
    texture = *config.texture;
  } else {
    TextureOptions opts;
    opts.width = 2 * config.width;
    opts.height = 2 * config.height;
    texture = procedural_texture(rng, opts);
  }
  SimSequence seq = simulate_sequence(config, texture, trajectory, thresholds);
  seq.config.texture = config.texture;
  return seq;
}

}  // namespace e2v::sim
