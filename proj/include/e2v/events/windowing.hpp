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

#include <optional>
#include <vector>

#include "e2v/events/event.hpp"

namespace e2v::events {

/// Splits the stream into consecutive windows of exactly `count` events.
/// The trailing partial window (size % count events) is dropped.
std::vector<EventWindow> window_by_count(const EventStream& stream, std::size_t count);

/// Number of events a by-count windowing would drop.
std::size_t dropped_by_count(const EventStream& stream, std::size_t count);

/// Half-open intervals [origin + k*duration, origin + (k+1)*duration) covering
/// every event. `origin` defaults to the first timestamp. Intervals with no
/// events produce empty windows.
std::vector<EventWindow> window_by_duration(const EventStream& stream, double duration,
                                            std::optional<double> origin = std::nullopt);

}  // namespace e2v::events
