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
#include <string>

#include "e2v/losses/losses.hpp"
#include "e2v/nn/network.hpp"

namespace e2v::train {

/// How event windows are cut when building training samples.
enum class WindowMode {
  Frames,  // events between consecutive ground-truth frames
  Count,   // fixed event count; target = gt frame nearest the last event
};

struct TrainConfig {
  int epochs = 10;
  int batch_size = 2;
  int unroll = 40;
  double lr = 1e-4;
  int crop = 128;  // clamped to the sensor size of smaller datasets
  double rotation_deg = 20.0;
  double flip_h = 0.5;
  double flip_v = 0.5;
  bool augment = true;
  losses::LossConfig loss;
  WindowMode window_mode = WindowMode::Frames;
  int window_events = 2000;
  double val_ratio = 0.95;  // fraction of sequences used for training
  std::uint64_t seed = 0;

  void validate() const;
};

/// Model architecture and training settings, as read from a config file.
struct RunConfig {
  nn::NetworkConfig network;
  TrainConfig train;
};

// Flat key=value text; '#' starts a comment. Keys:
//   num_encoders num_residual base_channels skip_mode input_bins recurrent
//   epochs batch_size unroll lr crop rotation_deg flip_h flip_v augment
//   lambda_tc alpha l0 loss window_mode window_events val_ratio seed
// `unroll` sets both the trainer unroll and the network config field.

/// Applies one key; throws UsageError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
/// Every key with its resolved value (also the run-manifest format).
std::map<std::string, std::string> describe(const RunConfig& config);
std::string format_settings(const std::map<std::string, std::string>& settings);

}  // namespace e2v::train
