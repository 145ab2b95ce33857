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

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "e2v/common.hpp"
#include "e2v/losses/losses.hpp"
#include "e2v/sim/texture.hpp"
#include "e2v/train/config.hpp"
#include "e2v/train/samples.hpp"
#include "e2v/train/sweep.hpp"
#include "e2v/train/trainer.hpp"

using namespace e2v;
using namespace e2v::train;

namespace {

nn::NetworkConfig desk_network() {
  nn::NetworkConfig c;
  c.num_encoders = 2;
  c.num_residual = 1;
  c.base_channels = 4;
  c.unroll = 4;
  return c;
}

sim::SimSequence small_sequence(std::uint64_t seed, int size = 32, bool smooth = false) {
  sim::SimConfig cfg;
  cfg.width = cfg.height = size;
  cfg.duration = 0.2;
  cfg.seed = seed;
  if (smooth) {
    std::mt19937_64 rng(seed);
    cfg.texture = sim::smooth_texture(rng, 2 * size, 2 * size);
    cfg.motion_scale = 0.3;
  }
  return sim::simulate_sequence(cfg);
}

}  // namespace

TEST_CASE("run config parsing") {
  const RunConfig c = parse_run_config(
      "# desk\nnum_encoders = 2\nbase_channels=8  # inline\nskip_mode=concat\nlambda_tc=0\nloss=mse\nunroll=6\n"
      "window_mode=count\nrecurrent=false\n");
  CHECK(c.network.num_encoders == 2);
  CHECK(c.network.base_channels == 8);
  CHECK(c.network.skip == nn::SkipMode::Concat);
  CHECK(c.network.recurrent == false);
  CHECK(c.train.loss.lambda_tc == 0.0);
  CHECK(c.train.loss.kind == losses::ReconstructionKind::MSE);
  CHECK(c.train.unroll == 6);
  CHECK(c.network.unroll == 6);
  CHECK(c.train.window_mode == WindowMode::Count);

  CHECK_THROWS_AS(parse_run_config("no_such_key=1\n"), UsageError);
  CHECK_THROWS_AS(parse_run_config("epochs=abc\n"), UsageError);
  CHECK_THROWS_AS(parse_run_config("epochs\n"), UsageError);
  CHECK_THROWS_AS(parse_run_config("lr=-1\n"), UsageError);

  const auto settings = describe(c);
  CHECK(settings.at("skip_mode") == "concat");
  std::string text;
  for (const auto& [k, v] : settings) text += k + "=" + v + "\n";
  const RunConfig again = parse_run_config(text);
  CHECK(describe(again) == settings);
  CHECK(format_settings(settings).find("num_encoders=2") != std::string::npos);

  const RunConfig defaults;
  CHECK(defaults.train.loss.lambda_tc == 5.0);
  CHECK(defaults.train.loss.l0 == 2);
  CHECK(defaults.train.lr == doctest::Approx(1e-4));
  CHECK(defaults.train.unroll == 40);
  CHECK(defaults.network.input_bins == 5);
}

TEST_CASE("split_dataset") {
  const auto [train, val] = split_dataset(20, 0.95, 3);
  CHECK(train.size() == 19);
  CHECK(val.size() == 1);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(val.begin(), val.end());
  CHECK(all.size() == 20);
  CHECK(split_dataset(20, 0.95, 3) == std::pair{train, val});
  CHECK(split_dataset(10, 1.0, 0).second.empty());
  CHECK(split_dataset(2, 0.99, 0).second.size() == 1);
  CHECK_THROWS_AS(split_dataset(1, 0.5, 0), UsageError);
}

TEST_CASE("windowing a simulated sequence") {
  const auto seq = small_sequence(1);
  const WindowedSequence w = window_sequence(seq, 5, WindowMode::Frames, 0);
  CHECK(w.tensors.size() == seq.frames.size() - 1);
  CHECK(w.targets.front() == seq.frames[1]);
  CHECK(w.flows.size() == w.targets.size() - 1);
  CHECK(w.flows.front() == seq.flows[1]);
  CHECK(w.timestamps.back() == seq.frame_times.back());

  const auto samples = make_samples(w, 4);
  CHECK(samples.size() == w.tensors.size() / 4);
  CHECK(samples[1].frames.front() == w.targets[4]);
  CHECK(samples[1].flows.size() == 3);

  const WindowedSequence c = window_sequence(seq, 5, WindowMode::Count, 200);
  CHECK(c.tensors.size() == seq.events.events.size() / 200);
  CHECK(c.flows.size() + 1 == c.targets.size());
}

TEST_CASE("compose_flows") {
  std::vector<FlowField> flows;
  for (int k = 0; k < 3; ++k) {
    FlowField f(8, 8);
    std::fill(f.dx.begin(), f.dx.end(), -1.0);
    std::fill(f.dy.begin(), f.dy.end(), 0.5);
    flows.push_back(f);
  }
  const FlowField same = compose_flows(flows, 1, 1);
  for (double d : same.dx) CHECK(d == 0.0);
  const FlowField two = compose_flows(flows, 0, 2);
  CHECK(two.dx[4 * 8 + 4] == doctest::Approx(-2.0));
  CHECK(two.dy[4 * 8 + 4] == doctest::Approx(1.0));
}

TEST_CASE("augmentation") {
  const auto seq = small_sequence(2, 48, true);
  const auto samples = make_samples(window_sequence(seq, 5, WindowMode::Frames, 0), 4);
  const TrainSample& s = samples.front();

  SUBCASE("identity") {
    const TrainSample out = apply_augmentation(s, identity_augmentation(48, 48));
    for (std::size_t k = 0; k < s.frames.size(); ++k)
      for (std::size_t i = 0; i < s.frames[k].size(); ++i)
        CHECK(out.frames[k].data[i] == doctest::Approx(s.frames[k].data[i]).epsilon(1e-12));
    CHECK(out.flows.front().dx[100] == doctest::Approx(s.flows.front().dx[100]));
  }
  SUBCASE("horizontal flip negates dx at the mirrored pixel") {
    Augmentation a = identity_augmentation(48, 48);
    a.flip_h = true;
    const TrainSample out = apply_augmentation(s, a);
    for (int y : {3, 20, 40})
      for (int x : {0, 7, 30}) {
        const std::size_t src = static_cast<std::size_t>(y) * 48 + (47 - x), dst = static_cast<std::size_t>(y) * 48 + x;
        CHECK(out.flows[0].dx[dst] == doctest::Approx(-s.flows[0].dx[src]));
        CHECK(out.flows[0].dy[dst] == doctest::Approx(s.flows[0].dy[src]));
        CHECK(out.frames[0].data[dst] == doctest::Approx(s.frames[0].data[src]));
      }
  }
  SUBCASE("warp consistency survives rotation, flips and crop") {
    Augmentation a;
    a.angle_rad = 0.3;
    a.flip_h = true;
    a.flip_v = true;
    a.crop_x = 4;
    a.crop_y = 2;
    a.out_width = 40;
    a.out_height = 40;
    const TrainSample out = apply_augmentation(s, a);
    for (std::size_t k = 1; k < out.frames.size(); ++k) {
      const Image w = losses::backward_warp(out.frames[k - 1], out.flows[k - 1]);
      const Image plain = losses::backward_warp(s.frames[k - 1], s.flows[k - 1]);
      double base = 0, worst = 0;
      for (int y = 10; y < 30; ++y)
        for (int x = 10; x < 30; ++x) worst = std::max(worst, std::abs(w.at(x, y) - out.frames[k].at(x, y)));
      for (int y = 10; y < 38; ++y)
        for (int x = 10; x < 38; ++x) base = std::max(base, std::abs(plain.at(x, y) - s.frames[k].at(x, y)));
      CAPTURE(base);
      CHECK(worst < 0.03);
    }
  }
  SUBCASE("random draws stay inside the sensor") {
    std::mt19937_64 rng(4);
    TrainConfig cfg;
    for (int i = 0; i < 50; ++i) {
      const Augmentation a = draw_augmentation(rng, 48, 40, 32, cfg);
      CHECK(a.out_width == 32);
      CHECK(a.crop_x + a.out_width <= 48);
      CHECK(a.crop_y + a.out_height <= 40);
      CHECK(std::abs(a.angle_rad) <= 20.0 * M_PI / 180.0 + 1e-12);
    }
  }
}

TEST_CASE("trainer bookkeeping and validation") {
  const nn::NetworkConfig net = desk_network();
  const auto w0 = window_sequence(small_sequence(3), 5, WindowMode::Frames, 0);
  const auto samples = make_samples(w0, 4);
  REQUIRE(samples.size() >= 2);
  const std::vector<TrainSample> two(samples.begin(), samples.begin() + 2);

  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.unroll = 4;
  cfg.crop = 32;
  cfg.lr = 1e-3;
  for (int batch : {1, 2}) {
    cfg.batch_size = batch;
    auto weights = nn::init_weights<float>(net, 1);
    TrainState st;
    const auto logs = train::train(weights, net, cfg, two, std::span<const WindowedSequence>(&w0, 1), st);
    REQUIRE(logs.size() == 1);
    CHECK(logs[0].steps == (2 + batch - 1) / batch);
    CHECK(st.epochs_done == 1);
    CHECK(std::isfinite(logs[0].train_loss));
    CHECK(logs[0].val_ssim > -1.0);
  }

  auto weights = nn::init_weights<float>(net, 2);
  const auto a = validate(weights, net, std::span<const WindowedSequence>(&w0, 1), cfg.loss);
  const auto b = validate(weights, net, std::span<const WindowedSequence>(&w0, 1), cfg.loss);
  CHECK(a.reconstruction == b.reconstruction);
  CHECK(a.temporal_error == b.temporal_error);
  CHECK(a.ssim == b.ssim);

  const std::vector<std::vector<Image>> oracle{w0.targets};
  const auto perfect = score_predictions(oracle, std::span<const WindowedSequence>(&w0, 1), cfg.loss);
  CHECK(perfect.ssim == 1.0);
  CHECK(perfect.reconstruction == 0.0);

  cfg.epochs = 2;
  cfg.batch_size = 1;
  cfg.loss.lambda_tc = 0.0;
  auto wa = nn::init_weights<float>(net, 5);
  auto wb = wa;
  TrainState sa, sb;
  train::train(wa, net, cfg, two, {}, sa);
  cfg.loss.lambda_tc = 5.0;
  train::train(wb, net, cfg, two, {}, sb);
  CHECK_FALSE(wa.params == wb.params);
}

TEST_CASE("training is reproducible and resumable") {
  const nn::NetworkConfig net = desk_network();
  const auto w0 = window_sequence(small_sequence(4), 5, WindowMode::Frames, 0);
  const auto samples = make_samples(w0, 4);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.unroll = 4;
  cfg.crop = 24;
  cfg.lr = 1e-3;
  cfg.batch_size = 2;

  auto a = nn::init_weights<float>(net, 1);
  TrainState sa;
  const auto la = train::train(a, net, cfg, samples, {}, sa);

  auto b = nn::init_weights<float>(net, 1);
  TrainState sb;
  cfg.epochs = 1;
  train::train(b, net, cfg, samples, {}, sb);
  const auto lb = train::train(b, net, cfg, samples, {}, sb);
  REQUIRE(lb.size() == 1);
  CHECK(lb[0].epoch == 2);
  CHECK(lb[0].train_loss == la[1].train_loss);
  CHECK(a.params == b.params);
}

TEST_CASE("compute_gradients covers every parameter") {
  const nn::NetworkConfig net = desk_network();
  const auto samples = make_samples(window_sequence(small_sequence(5), 5, WindowMode::Frames, 0), 4);
  auto weights = nn::init_weights<float>(net, 3);
  std::map<std::string, nn::Tensor<float>> grads;
  const TrainSample* batch[] = {&samples[0], &samples[1]};
  const StepLosses l = compute_gradients(weights, net, batch, losses::LossConfig{}, &grads);
  CHECK(std::isfinite(l.total));
  CHECK(l.total >= l.reconstruction);
  CHECK(grads.size() == weights.params.size());
  for (const auto& [k, g] : grads) {
    CAPTURE(k);
    CHECK(g.shape == weights.params.at(k).shape);
  }
}

TEST_CASE("sweep grid") {
  const SweepGrid grid;
  const auto configs = grid.configs(desk_network());
  CHECK(configs.size() == 72);
  std::set<std::tuple<int, int, int, int>> unique;
  for (const auto& c : configs) unique.insert({c.num_encoders, c.num_residual, static_cast<int>(c.skip), c.base_channels});
  CHECK(unique.size() == 72);

  for (int ne : {2, 3, 4})
    for (int nr : {0, 1, 2}) {
      std::size_t last = 0;
      for (int nb : {8, 16, 32, 64}) {
        nn::NetworkConfig c = desk_network();
        c.num_encoders = ne;
        c.num_residual = nr;
        c.base_channels = nb;
        const std::size_t p = nn::init_weights<float>(c, 0).parameter_count();
        CHECK(p >= last);
        last = p;
      }
    }

  SweepGrid small;
  small.num_encoders = {2};
  small.num_residual = {0, 1};
  small.skips = {nn::SkipMode::Sum};
  small.base_channels = {4};
  const auto w0 = window_sequence(small_sequence(6), 5, WindowMode::Frames, 0);
  const auto samples = make_samples(w0, 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.unroll = 4;
  cfg.crop = 32;
  const auto rows = run_sweep(small, desk_network(), cfg, samples, std::span<const WindowedSequence>(&w0, 1),
                              {.disable_recurrence = true, .timing_windows = 2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].val_loss <= rows[1].val_loss);
  for (const auto& r : rows) {
    CHECK(r.inference_ms > 0.0);
    CHECK(std::isfinite(r.inference_ms));
    CHECK(r.config.recurrent == false);
  }
  const std::string csv = sweep_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
