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

#include "e2v/events/voxel_grid.hpp"

#include <cmath>
#include <numeric>

#include "e2v/common.hpp"

namespace e2v::events {

EventTensor EventTensor::zeros(int bins, int height, int width) {
  if (bins < 1 || height < 1 || width < 1) throw UsageError("EventTensor: dimensions must be positive");
  EventTensor t;
  t.bins = bins;
  t.height = height;
  t.width = width;
  t.values.assign(static_cast<std::size_t>(bins) * height * width, 0.0);
  return t;
}

double EventTensor::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

EventTensor encode_voxel_grid(const EventWindow& window, int bins, int height, int width) {
  if (window.empty()) throw UsageError("encode_voxel_grid: empty window (use EventTensor::zeros)");
  EventTensor grid = EventTensor::zeros(bins, height, width);
  const double t0 = window.events.front().t;
  const double span = window.events.back().t - t0;
  const double scale = span > 0.0 ? static_cast<double>(bins - 1) / span : 0.0;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (const Event& e : window.events) {
    if (e.x >= width || e.y >= height) throw DataError("encode_voxel_grid: event outside sensor");
    const double ts = (e.t - t0) * scale;
    // Clamp guards the last event against rounding just past B-1.
    const int lo = std::min(static_cast<int>(ts), bins - 1);
    const double frac = lo == bins - 1 ? 0.0 : ts - lo;
    const std::size_t pix = static_cast<std::size_t>(e.y) * width + e.x;
    const double p = e.polarity;
    grid.values[lo * plane + pix] += p * (1.0 - frac);
    if (lo + 1 < bins) grid.values[(lo + 1) * plane + pix] += p * frac;
  }
  return grid;
}

void normalize_tensor(EventTensor& tensor) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : tensor.values) {
    if (v != 0.0) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) return;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double v : tensor.values)
    if (v != 0.0) sq += (v - mean) * (v - mean);
  const double stddev = std::sqrt(sq / static_cast<double>(n));
  for (double& v : tensor.values) {
    if (v == 0.0) continue;
    v = stddev < kNormalizeStdFloor ? 0.0 : (v - mean) / stddev;
  }
}

}  // namespace e2v::events
