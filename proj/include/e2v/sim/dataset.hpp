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

#include <filesystem>
#include <span>
#include <vector>

#include "e2v/sim/simulator.hpp"

namespace e2v::sim {

// On-disk layout, one directory per sequence (seq_0000, seq_0001, ...):
//   events.evb       EVB1 event stream
//   frames/NNNN.pgm  ground-truth frames (P5, 8-bit)
//   flows/NNNN.flw   FLW1 flow mapping frame NNNN+1 to frame NNNN
//   timestamps.txt   "index seconds" per frame, 9 decimals
//   meta.txt         key=value: thresholds (6 decimals), seed, sensor and rates

void write_sequence(const SimSequence& seq, const std::filesystem::path& dir);
SimSequence read_sequence(const std::filesystem::path& dir);

/// Writes seq_NNNN subdirectories under `root` (created if missing).
void write_dataset(std::span<const SimSequence> sequences, const std::filesystem::path& root);
/// Reads every seq_* directory under `root` in name order.
std::vector<SimSequence> read_dataset(const std::filesystem::path& root);

/// 8-bit PGM / f32 flow quantization applied by the writer, for comparing a
/// re-read dataset to the in-memory one.
SimSequence quantized_like_disk(const SimSequence& seq);

}  // namespace e2v::sim
