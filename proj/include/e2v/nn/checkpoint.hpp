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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "e2v/nn/adam.hpp"
#include "e2v/nn/network.hpp"

namespace e2v::nn {

// "E2V1" container, little-endian:
//   magic[4] u32 version
//   config: u32 num_encoders, num_residual, base_channels, skip (0 sum, 1 concat),
//           input_bins, unroll, recurrent, head_kernel
//   u32 n_params   { string key, u32 dims[4], f32 data[numel] } * n_params
//   u32 n_buffers  { same } * n_buffers
//   u8 has_optimizer [ u64 step, u32 n { string key, f32 m[numel], f32 v[numel] } * n ]
//   u32 n_meta     { string key, string value } * n_meta
//   u32 crc32 of all preceding bytes
// Strings are u32 length + bytes.
struct Checkpoint {
  NetworkConfig config;
  ModelWeights<float> weights;
  std::optional<AdamState<float>> optimizer;
  std::map<std::string, std::string> metadata;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& checkpoint);
/// Throws DataError on bad magic/version, truncation or checksum mismatch.
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);
/// Also rejects a checkpoint whose config differs from `expected`, naming
/// the first differing key.
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes, const NetworkConfig& expected);

void save_checkpoint_file(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint_file(const std::filesystem::path& path);

}  // namespace e2v::nn
