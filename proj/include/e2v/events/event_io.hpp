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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "e2v/events/event.hpp"

namespace e2v::events {

/// Parses the text format: a "W H" header line followed by "t x y p" lines.
/// p may be 0/1 or -1/+1 (0 maps to -1). Blank lines are ignored.
/// Throws DataError with the 1-based line number on any violation.
EventStream parse_event_text(std::string_view text);
std::string format_event_text(const EventStream& stream);

inline constexpr char kEventBinaryMagic[4] = {'E', 'V', 'B', '1'};
inline constexpr std::size_t kEventBinaryHeaderSize = 16;
inline constexpr std::size_t kEventBinaryRecordSize = 13;

/// "EVB1" container: magic, u16 W, u16 H, u64 count, then count packed
/// records of f64 t, u16 x, u16 y, i8 p. Little-endian throughout.
std::vector<std::uint8_t> write_event_binary(const EventStream& stream);
EventStream read_event_binary(std::span<const std::uint8_t> bytes);

/// Loads either format, chosen by content (binary if it starts with "EVB1").
EventStream load_events(const std::filesystem::path& path);
/// Writes binary for ".evb", text otherwise.
void save_events(const EventStream& stream, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace e2v::events
