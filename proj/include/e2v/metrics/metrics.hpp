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

#include <span>
#include <string>
#include <vector>

#include "e2v/pipeline/frame.hpp"
#include "e2v/sim/image.hpp"

namespace e2v::metrics {

double mse(const Image& a, const Image& b);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Single-scale SSIM with a Gaussian window, averaged over the positions
/// where the window fits entirely inside the image.
double ssim(const Image& a, const Image& b, const SsimOptions& options = {});

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_window(int size, double sigma);

struct ClaheOptions {
  int tiles_x = 8;
  int tiles_y = 8;
  int bins = 256;
  /// Clip limit as a multiple of the mean bin count; <= 0 disables clipping.
  double clip = 2.0;
};

/// Contrast-limited adaptive histogram equalization. Throws UsageError when a
/// tile would be smaller than 2x2 pixels.
Image local_hist_eq(const Image& image, const ClaheOptions& options = {});

/// Mean over consecutive pairs of the masked L1 warp error; masks come from
/// the ground-truth frames. flows[k] maps frame k+1 into frame k.
double temporal_error(std::span<const Image> frames, std::span<const FlowField> flows, std::span<const Image> gts,
                      double alpha = 50.0);

struct SequenceMetrics {
  std::string name;
  double mse = 0.0;
  double ssim = 0.0;
  double temporal_error = 0.0;
  int pairs = 0;    // matched frame pairs
  int skipped = 0;  // gt frames with no reconstruction within tolerance
};

struct EvalReport {
  std::vector<SequenceMetrics> rows;

  /// Unweighted mean over sequences; pair counts are summed.
  SequenceMetrics mean() const;
  /// Header, one row per sequence, then a "mean" row.
  std::string to_csv() const;
  std::string to_table() const;
};

struct EvalOptions {
  double tolerance = 1e-3;  // s
  double skip_head = 0.0;   // s
  double skip_tail = 0.0;   // s
  bool hist_eq = true;
  double alpha = 50.0;
  ClaheOptions clahe;
};

/// Index of the frame nearest to `t` within `tolerance`, or -1. `frames`
/// must be sorted by timestamp.
int match_nearest(std::span<const Frame> frames, double t, double tolerance);

/// Matches each ground-truth frame to the nearest reconstruction and
/// computes MSE/SSIM over matched pairs and the temporal error over
/// consecutive matched gt indices. Throws DataError when nothing matches.
SequenceMetrics evaluate_sequence(std::span<const Frame> reconstructed, std::span<const Image> gt_frames,
                                  std::span<const double> gt_times, std::span<const FlowField> gt_flows,
                                  const EvalOptions& options);

}  // namespace e2v::metrics
