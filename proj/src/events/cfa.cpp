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

#include "e2v/events/cfa.hpp"

#include <string>

#include "e2v/common.hpp"

namespace e2v::events {

CfaPattern CfaPattern::parse(std::string_view text) {
  if (text.size() != 4) throw UsageError("CFA pattern must have 4 letters, got \"" + std::string(text) + "\"");
  CfaPattern p;
  int reds = 0, greens = 0, blues = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    switch (text[i]) {
      case 'R': case 'r': p.phase[i] = CfaColor::Red; ++reds; break;
      case 'G': case 'g': p.phase[i] = greens++ == 0 ? CfaColor::Green1 : CfaColor::Green2; break;
      case 'B': case 'b': p.phase[i] = CfaColor::Blue; ++blues; break;
      default: throw UsageError("CFA pattern letter must be R, G or B");
    }
  }
  if (reds != 1 || greens != 2 || blues != 1) throw UsageError("CFA pattern must contain one R, two G and one B");
  return p;
}

std::array<EventStream, 4> split_cfa(const EventStream& stream, const CfaPattern& pattern) {
  if (stream.width % 2 != 0 || stream.height % 2 != 0)
    throw UsageError("split_cfa: sensor dimensions must be even");
  std::array<EventStream, 4> out;
  for (auto& s : out) {
    s.width = stream.width / 2;
    s.height = stream.height / 2;
    s.events.reserve(stream.events.size() / 4 + 1);
  }
  for (const Event& e : stream.events) {
    const auto c = static_cast<std::size_t>(pattern.color_at(e.x, e.y));
    Event half = e;
    half.x = static_cast<std::uint16_t>(e.x / 2);
    half.y = static_cast<std::uint16_t>(e.y / 2);
    out[c].events.push_back(half);
  }
  return out;
}

}  // namespace e2v::events
