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

#include <array>
#include <string_view>

#include "e2v/events/event.hpp"

namespace e2v::events {

enum class CfaColor { Red, Green1, Green2, Blue };

/// RGBG Bayer layout: the color filter at each (x % 2, y % 2) phase.
/// Default is the RGGB arrangement: R at (0,0), G at (1,0) and (0,1), B at (1,1).
struct CfaPattern {
  std::array<CfaColor, 4> phase = {CfaColor::Red, CfaColor::Green1, CfaColor::Green2, CfaColor::Blue};

  /// phase index = (y % 2) * 2 + (x % 2)
  CfaColor color_at(int x, int y) const { return phase[(y & 1) * 2 + (x & 1)]; }
  /// Parses a 4-letter string such as "RGGB", "GRBG", "BGGR", "GBRG".
  static CfaPattern parse(std::string_view text);
};

/// Routes every event to the quarter-resolution stream of its filter color,
/// indexed by CfaColor. Coordinates are halved. Throws UsageError on odd sizes.
std::array<EventStream, 4> split_cfa(const EventStream& stream, const CfaPattern& pattern = {});

}  // namespace e2v::events
