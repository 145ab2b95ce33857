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
#include <random>
#include <span>
#include <vector>

#include "e2v/events/voxel_grid.hpp"
#include "e2v/sim/simulator.hpp"
#include "e2v/train/config.hpp"

namespace e2v::train {

/// A full sequence cut into network inputs with aligned targets.
struct WindowedSequence {
  std::vector<events::EventTensor> tensors;  // normalized voxel grids
  std::vector<Image> targets;                // gt frame per window
  std::vector<double> timestamps;            // target frame times
  /// flows[k] maps target k+1 into target k.
  std::vector<FlowField> flows;
};

struct TrainSample {
  std::vector<events::EventTensor> tensors;
  std::vector<Image> frames;
  std::vector<FlowField> flows;  // size L-1
};

/// Cuts a simulated sequence into windows. Frames mode: window k holds the
/// events in [t_k, t_{k+1}) (the last one closed) and targets frame k+1.
/// Empty windows become zero tensors.
WindowedSequence window_sequence(const sim::SimSequence& seq, int bins, WindowMode mode, int window_events);

/// Non-overlapping runs of `unroll` consecutive windows; the remainder is dropped.
std::vector<TrainSample> make_samples(const WindowedSequence& seq, int unroll);

/// Backward flow from frame b to frame a (a <= b) by chaining per-frame
/// flows with bilinear sampling. a == b gives zero flow.
FlowField compose_flows(std::span<const FlowField> flows, std::size_t a, std::size_t b);

/// One geometric transform applied to a whole sample: rotation about the
/// image center, optional flips, then a crop. Maps output pixel p to source
/// position center + R^-1 (p + offset - center) with R = flips * rotation.
struct Augmentation {
  double angle_rad = 0.0;
  bool flip_h = false;
  bool flip_v = false;
  int crop_x = 0;
  int crop_y = 0;
  int out_width = 0;
  int out_height = 0;
};

Augmentation draw_augmentation(std::mt19937_64& rng, int width, int height, int crop, const TrainConfig& config);
Augmentation identity_augmentation(int width, int height);

/// Frames and per-bin tensors are resampled bilinearly with zero fill; flow
/// vectors are resampled (edge-clamped) and rotated/reflected.
TrainSample apply_augmentation(const TrainSample& sample, const Augmentation& aug);
TrainSample augment(const TrainSample& sample, std::mt19937_64& rng, int crop, const TrainConfig& config);

/// Deterministic sequence-level split: round(ratio * n) indices for training
/// (at least one left for validation when n >= 2). Throws UsageError if
/// n < 2.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_dataset(std::size_t count, double ratio,
                                                                            std::uint64_t seed);

}  // namespace e2v::train
