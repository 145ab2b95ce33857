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

#include "e2v/events/windowing.hpp"

#include <algorithm>
#include <cmath>

#include "e2v/common.hpp"

namespace e2v::events {

std::vector<EventWindow> window_by_count(const EventStream& stream, std::size_t count) {
  if (count == 0) throw UsageError("window_by_count: N must be >= 1");
  std::vector<EventWindow> windows;
  const std::span<const Event> all(stream.events);
  const std::size_t n = all.size() / count;
  windows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto slice = all.subspan(k * count, count);
    windows.push_back({slice, slice.front().t, slice.back().t});
  }
  return windows;
}

std::size_t dropped_by_count(const EventStream& stream, std::size_t count) {
  if (count == 0) throw UsageError("window_by_count: N must be >= 1");
  return stream.events.size() % count;
}

std::vector<EventWindow> window_by_duration(const EventStream& stream, double duration,
                                            std::optional<double> origin) {
  if (!(duration > 0.0)) throw UsageError("window_by_duration: duration must be > 0");
  std::vector<EventWindow> windows;
  if (stream.events.empty()) return windows;
  const double t0 = origin.value_or(stream.events.front().t);
  if (t0 > stream.events.front().t) throw UsageError("window_by_duration: origin after first event");
  const double last = stream.events.back().t;
  const auto n = static_cast<std::size_t>(std::floor((last - t0) / duration)) + 1;
  windows.reserve(n);
  const std::span<const Event> all(stream.events);
  std::size_t begin = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = t0 + static_cast<double>(k) * duration;
    const double hi = t0 + static_cast<double>(k + 1) * duration;
    std::size_t end = begin;
    if (k + 1 == n) {
      end = all.size();
    } else {
      while (end < all.size() && all[end].t < hi) ++end;
    }
    windows.push_back({all.subspan(begin, end - begin), lo, hi});
    begin = end;
  }
  return windows;
}

}  // namespace e2v::events
