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

#include "e2v/train/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "e2v/common.hpp"

namespace e2v::train {

std::vector<nn::NetworkConfig> SweepGrid::configs(const nn::NetworkConfig& base) const {
  std::vector<nn::NetworkConfig> out;
  for (int ne : num_encoders)
    for (int nr : num_residual)
      for (nn::SkipMode skip : skips)
        for (int nb : base_channels) {
          nn::NetworkConfig c = base;
          c.num_encoders = ne;
          c.num_residual = nr;
          c.skip = skip;
          c.base_channels = nb;
          out.push_back(c);
        }
  return out;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const nn::NetworkConfig& base, const TrainConfig& config,
                                std::span<const TrainSample> samples, std::span<const WindowedSequence> validation,
                                const SweepOptions& options) {
  if (validation.empty() || validation[0].tensors.empty()) throw UsageError("sweep needs a validation sequence");
  std::vector<SweepRow> rows;
  for (nn::NetworkConfig c : grid.configs(base)) {
    if (options.disable_recurrence) c.recurrent = false;
    c.validate();
    nn::ModelWeights<float> weights = nn::init_weights<float>(c, config.seed);
    TrainState state;
    if (config.epochs > 0) train(weights, c, config, samples, validation, state);

    SweepRow row;
    row.config = c;
    row.parameters = weights.parameter_count();
    row.val_loss = validate(weights, c, validation, config.loss).reconstruction;

    const auto& seq = validation[0];
    const std::size_t n = std::min<std::size_t>(seq.tensors.size(), static_cast<std::size_t>(std::max(1, options.timing_windows)));
    WindowedSequence timed;
    timed.tensors.assign(seq.tensors.begin(), seq.tensors.begin() + static_cast<std::ptrdiff_t>(n));
    timed.targets.assign(seq.targets.begin(), seq.targets.begin() + static_cast<std::ptrdiff_t>(n));
    const auto t0 = std::chrono::steady_clock::now();
    (void)predict_sequence(weights, c, timed);
    const auto t1 = std::chrono::steady_clock::now();
    row.inference_ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / static_cast<double>(n);
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.val_loss < b.val_loss; });
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "num_encoders,num_residual,skip_mode,base_channels,recurrent,parameters,val_loss,inference_ms\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%s,%d,%d,%zu,%.6f,%.4f\n", r.config.num_encoders, r.config.num_residual,
                  nn::to_string(r.config.skip).c_str(), r.config.base_channels, r.config.recurrent ? 1 : 0,
                  r.parameters, r.val_loss, r.inference_ms);
    out += buf;
  }
  return out;
}

}  // namespace e2v::train
