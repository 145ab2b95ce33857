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
#include <span>
#include <vector>

namespace e2v::events {

struct Event {
  double t = 0.0;  // seconds
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t polarity = 1;  // -1 or +1

  friend bool operator==(const Event&, const Event&) = default;
};

/// A time-ordered event stream from a sensor of the declared size.
struct EventStream {
  int width = 0;
  int height = 0;
  std::vector<Event> events;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Checks sensor size, coordinate bounds, polarity values and time order.
/// Throws DataError naming the first offending event.
void validate(const EventStream& stream);

/// Non-owning view of a contiguous run of events; the stream must outlive it.
struct EventWindow {
  std::span<const Event> events;
  double t_start = 0.0;
  double t_end = 0.0;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
};

}  // namespace e2v::events
