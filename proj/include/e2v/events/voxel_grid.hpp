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
#include <vector>

#include "e2v/events/event.hpp"

namespace e2v::events {

/// B x H x W spatio-temporal voxel grid, bin-major.
struct EventTensor {
  int bins = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  /// The explicit all-zero tensor (used for empty duration windows).
  static EventTensor zeros(int bins, int height, int width);

  double& at(int b, int y, int x) { return values[(static_cast<std::size_t>(b) * height + y) * width + x]; }
  double at(int b, int y, int x) const { return values[(static_cast<std::size_t>(b) * height + y) * width + x]; }
  double sum() const;
};

/// Bilinear temporal binning: each event splits its polarity between the two
/// bins nearest to t* = (B-1)(t - t0)/(t_last - t0). A window whose events
/// all share one timestamp maps every event to bin 0. Throws UsageError on an
/// empty window and DataError on out-of-bounds coordinates.
EventTensor encode_voxel_grid(const EventWindow& window, int bins, int height, int width);

/// Standardizes the nonzero entries to mean 0 / population std 1 in place.
/// If their std is below 1e-8 the nonzero entries are set to 0.
void normalize_tensor(EventTensor& tensor);

inline constexpr double kNormalizeStdFloor = 1e-8;

}  // namespace e2v::events
