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

#include <span>
#include <string>
#include <vector>

#include "e2v/train/trainer.hpp"

namespace e2v::train {

struct SweepGrid {
  std::vector<int> num_encoders{2, 3, 4};
  std::vector<int> num_residual{0, 1, 2};
  std::vector<nn::SkipMode> skips{nn::SkipMode::Sum, nn::SkipMode::Concat};
  std::vector<int> base_channels{8, 16, 32, 64};

  std::vector<nn::NetworkConfig> configs(const nn::NetworkConfig& base) const;
};

struct SweepRow {
  nn::NetworkConfig config;
  std::size_t parameters = 0;
  double val_loss = 0.0;
  double inference_ms = 0.0;  // mean eval-mode forward time per window
};

struct SweepOptions {
  bool disable_recurrence = false;
  int timing_windows = 4;  // windows timed per config
};

/// Trains each configuration with `config` (epochs = budget) and returns the
/// rows sorted by validation loss.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const nn::NetworkConfig& base, const TrainConfig& config,
                                std::span<const TrainSample> samples, std::span<const WindowedSequence> validation,
                                const SweepOptions& options = {});

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace e2v::train
