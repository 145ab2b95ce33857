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
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "e2v/events/event.hpp"
#include "e2v/sim/homography.hpp"
#include "e2v/sim/image.hpp"

namespace e2v::sim {

struct ContrastThresholds {
  double c_pos = 0.18;
  double c_neg = 0.18;
};

inline constexpr double kThresholdMean = 0.18;
inline constexpr double kThresholdStd = 0.03;
inline constexpr double kThresholdFloor = 0.01;
/// Offset inside the log mapping L = ln(I + kLogEps).
inline constexpr double kLogEps = 0.001;

/// Independent N(0.18, 0.03^2) draws for both polarities, clamped to >= 0.01.
ContrastThresholds sample_thresholds(std::mt19937_64& rng, double mean = kThresholdMean,
                                     double stddev = kThresholdStd);

/// Each sensor pixel samples the texture at h^-1(pixel) shifted so that the
/// identity maps to the centered crop. Bilinear, edge-clamped.
Image render_frame(const Image& texture, const Homography& h, int width, int height);

/// Backward flow for frame k: flow(u) = h_prev(h_next^-1(u)) - u, i.e. where
/// pixel u of frame k sits in frame k-1.
FlowField gt_flow(const Homography& h_prev, const Homography& h_next, int width, int height);

double log_intensity(double intensity);

/// Idealized DVS pixel array fed with log-intensity frames. Between two
/// frames the per-pixel log signal is linear in time; every crossing of
/// reference +- C emits an event at the interpolated time and moves the
/// reference by exactly one threshold.
class EventGenerator {
 public:
  EventGenerator(int width, int height, ContrastThresholds thresholds);

  void reset(const Image& log_frame, double t);
  /// Appends the time-sorted events of (t_last, t] to `out`.
  void advance(const Image& log_frame, double t, std::vector<events::Event>& out);

  bool initialized() const { return initialized_; }
  const std::vector<double>& reference() const { return reference_; }

 private:
  int width_;
  int height_;
  ContrastThresholds c_;
  bool initialized_ = false;
  double t_last_ = 0.0;
  std::vector<double> last_;
  std::vector<double> reference_;
};

/// Events from intensity frames (mapped through log_intensity).
/// Requires >= 2 frames with strictly increasing timestamps.
events::EventStream generate_events(std::span<const Image> frames, std::span<const double> timestamps,
                                    ContrastThresholds thresholds);
/// Same, but the frames already hold log intensities.
events::EventStream generate_events_from_log(std::span<const Image> log_frames, std::span<const double> timestamps,
                                             ContrastThresholds thresholds);

struct SimConfig {
  int width = 64;
  int height = 64;
  double duration = 0.5;  // s
  double f_gt = 50.0;     // ground-truth frame rate (Hz)
  double f_sim = 1000.0;  // internal render rate (Hz)
  std::uint64_t seed = 0;
  double motion_scale = 1.0;
  std::optional<Image> texture;  // procedural when empty
};

struct SimSequence {
  events::EventStream events;
  std::vector<double> frame_times;
  std::vector<Image> frames;
  /// flows[k] maps pixels of frames[k+1] to positions in frames[k].
  std::vector<FlowField> flows;
  ContrastThresholds thresholds;
  SimConfig config;
};

/// Deterministic in config.seed. Ground-truth frames at k / f_gt for
/// k = 0 .. round(duration * f_gt) - 1; events cover [0, last frame time].
SimSequence simulate_sequence(const SimConfig& config);
/// Variant with an explicit trajectory and thresholds (tests, fixtures).
SimSequence simulate_sequence(const SimConfig& config, const Image& texture, const Trajectory& trajectory,
                              ContrastThresholds thresholds);

}  // namespace e2v::sim
