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

#include <cmath>
#include <random>

#include "doctest.h"
#include "e2v/common.hpp"
#include "e2v/losses/losses.hpp"
#include "e2v/metrics/metrics.hpp"
#include "e2v/sim/simulator.hpp"

using namespace e2v;
using namespace e2v::metrics;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(w, h);
  for (double& v : img.data) v = u(rng);
  return img;
}

}  // namespace

TEST_CASE("mse") {
  std::mt19937_64 rng(1);
  const Image a = random_image(rng, 9, 7), b = random_image(rng, 9, 7);
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(Image(4, 4, 0.0), Image(4, 4, 1.0)) == 1.0);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  CHECK(mse(a, b) == doctest::Approx(s / 63.0).epsilon(1e-14));
  CHECK_THROWS_AS(mse(a, Image(7, 9)), UsageError);
}

TEST_CASE("ssim") {
  std::mt19937_64 rng(2);
  const Image a = random_image(rng, 24, 20);
  CHECK(ssim(a, a) == 1.0);

  Image board(16, 16), inverse(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      board.at(x, y) = (x + y) % 2;
      inverse.at(x, y) = 1.0 - board.at(x, y);
    }
  CHECK(ssim(board, inverse) < 0.0);

  // Flat images: only the luminance term survives.
  const double mu_a = 0.4, mu_b = 0.5, c1 = 0.01 * 0.01;
  const double closed = (2 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
  CHECK(ssim(Image(16, 16, mu_a), Image(16, 16, mu_b)) == doctest::Approx(closed).epsilon(1e-12));

  const auto w = gaussian_window(11, 1.5);
  double sum = 0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(w[5] > w[4]);
  CHECK(w[0] == doctest::Approx(w[10]));
  CHECK_THROWS_AS(ssim(Image(8, 8), Image(8, 8)), UsageError);
}

TEST_CASE("local histogram equalization") {
  SUBCASE("tiles holding every level once are left nearly unchanged") {
    Image img(128, 128);
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x) img.at(x, y) = ((y % 16) * 16 + (x % 16)) / 255.0;
    const Image out = local_hist_eq(img);
    double worst = 0;
    for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(out.data[i] - img.data[i]));
    CHECK(worst < 0.05);
  }
  SUBCASE("constant stays constant") {
    const Image out = local_hist_eq(Image(64, 48, 0.3));
    for (double v : out.data) CHECK(v == out.data[0]);
  }
  SUBCASE("range") {
    std::mt19937_64 rng(3);
    Image img = random_image(rng, 50, 40);
    for (double& v : img.data) v = 0.3 + 0.2 * v;
    const Image out = local_hist_eq(img);
    for (double v : out.data) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK_THROWS_AS(local_hist_eq(Image(15, 64)), UsageError);
}

TEST_CASE("temporal error") {
  const std::vector<Image> frozen(3, Image(8, 8, 0.4));
  const std::vector<FlowField> zero(2, FlowField(8, 8));
  CHECK(temporal_error(frozen, zero, frozen) == 0.0);

  sim::SimConfig cfg;
  cfg.width = cfg.height = 32;
  cfg.duration = 0.2;
  cfg.seed = 6;
  const auto seq = sim::simulate_sequence(cfg);
  const double gt_self = temporal_error(seq.frames, seq.flows, seq.frames);
  CHECK(gt_self > 0.0);
  CHECK(gt_self < 0.02);
}

TEST_CASE("evaluation protocol") {
  sim::SimConfig cfg;
  cfg.width = cfg.height = 32;
  cfg.duration = 0.2;
  cfg.seed = 8;
  const auto seq = sim::simulate_sequence(cfg);
  std::vector<Frame> frames;
  for (std::size_t k = 0; k < seq.frames.size(); ++k) frames.push_back({seq.frame_times[k] + 2e-4, seq.frames[k]});

  const auto self = evaluate_sequence(frames, seq.frames, seq.frame_times, seq.flows, {});
  CHECK(self.mse == 0.0);
  CHECK(self.ssim == 1.0);
  CHECK(self.pairs == 10);
  CHECK(self.skipped == 0);

  std::vector<Frame> sparse;
  for (std::size_t k = 0; k < frames.size(); k += 2) sparse.push_back(frames[k]);
  sparse[1].timestamp += 0.005;  // beyond the 1 ms tolerance
  const auto partial = evaluate_sequence(sparse, seq.frames, seq.frame_times, seq.flows, {});
  CHECK(partial.pairs == 4);
  CHECK(partial.skipped == 6);

  CHECK(match_nearest(frames, seq.frame_times[3], 1e-3) == 3);
  CHECK(match_nearest(frames, seq.frame_times[3] + 0.5, 1e-3) == -1);

  std::vector<Frame> far = frames;
  for (Frame& f : far) f.timestamp += 1.0;
  CHECK_THROWS_AS(evaluate_sequence(far, seq.frames, seq.frame_times, seq.flows, {}), DataError);

  EvalReport report;
  report.rows = {self, partial};
  report.rows[0].name = "a";
  report.rows[1].name = "b";
  const std::string csv = report.to_csv();
  CHECK(csv.rfind("sequence,mse,ssim,temporal_error,pairs,skipped", 0) == 0);
  CHECK(csv.find("\nmean,") != std::string::npos);
  CHECK(report.mean().pairs == 14);
  CHECK(report.mean().ssim == doctest::Approx(0.5 * (self.ssim + partial.ssim)));
}
