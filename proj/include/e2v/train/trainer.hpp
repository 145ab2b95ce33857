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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "e2v/nn/adam.hpp"
#include "e2v/nn/network.hpp"
#include "e2v/train/samples.hpp"

namespace e2v::train {

struct EpochLog {
  int epoch = 0;  // 1-based, continues across resumed runs
  long steps = 0;  // optimizer steps taken so far
  double train_loss = 0.0;  // mean total loss per sample
  double train_rec = 0.0;   // mean per-step reconstruction loss
  double train_tc = 0.0;    // mean per-step temporal loss (steps >= L0)
  double val_rec = 0.0;
  double val_temporal = 0.0;
  double val_ssim = 0.0;
};

/// CSV header + one row per epoch.
std::string curves_csv(std::span<const EpochLog> logs);

struct ValidationSnapshot {
  double reconstruction = 0.0;  // mean L1 (or MSE) over windows
  double temporal_error = 0.0;
  double ssim = 0.0;
  int sequences = 0;
};

/// Metrics for given predictions (one image per window) of full sequences.
ValidationSnapshot score_predictions(std::span<const std::vector<Image>> predictions,
                                     std::span<const WindowedSequence> sequences, const losses::LossConfig& loss);

/// Eval-mode forward over each full sequence from the zero state.
std::vector<Image> predict_sequence(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                                    const WindowedSequence& sequence);
ValidationSnapshot validate(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                            std::span<const WindowedSequence> sequences, const losses::LossConfig& loss);

struct StepLosses {
  double total = 0.0;  // batch-mean total loss
  double reconstruction = 0.0;
  double temporal = 0.0;
};

/// Unrolls the network over a batch of equally sized samples from the zero
/// state, backpropagates the summed loss through all steps and returns the
/// parameter gradients. BN runs in train mode.
StepLosses compute_gradients(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                             std::span<const TrainSample* const> batch, const losses::LossConfig& loss,
                             std::map<std::string, nn::Tensor<float>>* grads);

struct TrainState {
  nn::AdamState<float> optimizer;
  int epochs_done = 0;
};

struct TrainCallbacks {
  /// Called after each epoch with the updated weights.
  std::function<void(const EpochLog&, const nn::ModelWeights<float>&, const TrainState&)> on_epoch;
  /// Optional hard cap on optimizer steps (0 = none).
  long max_steps = 0;
};

/// Trains for config.epochs epochs. Samples are reshuffled every epoch
/// (seeded by config.seed and the epoch number) and augmented if enabled.
/// A non-finite loss throws NumericError; the weights are then those of
/// the last completed optimizer step.
std::vector<EpochLog> train(nn::ModelWeights<float>& weights, const nn::NetworkConfig& network,
                            const TrainConfig& config, std::span<const TrainSample> samples,
                            std::span<const WindowedSequence> validation, TrainState& state,
                            const TrainCallbacks& callbacks = {});

}  // namespace e2v::train
