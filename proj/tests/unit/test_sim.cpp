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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "e2v/common.hpp"
#include "e2v/events/event_io.hpp"
#include "e2v/losses/losses.hpp"
#include "e2v/sim/dataset.hpp"
#include "e2v/sim/simulator.hpp"
#include "e2v/sim/texture.hpp"
#include "helpers.hpp"

using namespace e2v;
using namespace e2v::sim;

namespace {

Image ramp_texture(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = 0.1 + 0.8 * x / (w - 1);
  return img;
}

Image log_image(int w, int h, double value) { return Image(w, h, value); }

}  // namespace

TEST_CASE("contrast thresholds: determinism and moments") {
  std::mt19937_64 a(7), b(7);
  const auto ta = sample_thresholds(a), tb = sample_thresholds(b);
  CHECK(ta.c_pos == tb.c_pos);
  CHECK(ta.c_neg == tb.c_neg);

  std::mt19937_64 rng(11);
  double s = 0, s2 = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double c = sample_thresholds(rng).c_pos;
    s += c;
    s2 += c * c;
  }
  const double mean = s / n, sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean - 0.18) < 0.01);
  CHECK(std::abs(sd - 0.03) < 0.01);

  std::mt19937_64 tail(1);
  for (int i = 0; i < 100; ++i) {
    const auto c = sample_thresholds(tail, -0.02, 0.0);
    CHECK(c.c_pos == kThresholdFloor);
    CHECK(c.c_neg == kThresholdFloor);
  }
}

TEST_CASE("homography algebra") {
  const Homography h = Homography::from_params(3.0, -2.0, 0.2, 0.1, 0.05, 10.0, 8.0);
  const Homography id = h * h.inverse();
  for (int i = 0; i < 9; ++i) CHECK(id.m[i] == doctest::Approx(Homography::identity().m[i]).scale(1.0));
  const auto [x, y] = Homography::translation(2, 3).apply(1, 1);
  CHECK(x == 3.0);
  CHECK(y == 4.0);
  Homography singular;
  singular.m = {1, 2, 0, 2, 4, 0, 0, 0, 1};
  CHECK_FALSE(singular.invertible());
  CHECK_THROWS_AS(singular.inverse(), UsageError);
}

TEST_CASE("render_frame") {
  std::mt19937_64 rng(3);
  const Image tex = smooth_texture(rng, 40, 30);
  SUBCASE("identity is the center crop") {
    const Image f = render_frame(tex, Homography::identity(), 20, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 20; ++x) CHECK(f.at(x, y) == tex.at(x + 10, y + 10));
  }
  SUBCASE("integer translation shifts the crop") {
    const Image f0 = render_frame(tex, Homography::identity(), 20, 10);
    const Image f1 = render_frame(tex, Homography::translation(2, 1), 20, 10);
    for (int y = 1; y < 10; ++y)
      for (int x = 2; x < 20; ++x) CHECK(f1.at(x, y) == doctest::Approx(f0.at(x - 2, y - 1)).epsilon(1e-12));
  }
  SUBCASE("half-pixel translation on a ramp lands on midpoints") {
    const Image r = ramp_texture(40, 30);
    const Image f0 = render_frame(r, Homography::identity(), 20, 10);
    const Image f = render_frame(r, Homography::translation(0.5, 0), 20, 10);
    for (int x = 1; x < 20; ++x) CHECK(f.at(x, 5) == doctest::Approx(0.5 * (f0.at(x - 1, 5) + f0.at(x, 5))));
  }
}

TEST_CASE("event generator: analytic crossings on one pixel") {
  const ContrastThresholds c{0.2, 0.25};
  EventGenerator gen(1, 1, c);
  gen.reset(log_image(1, 1, 0.0), 0.0);
  std::vector<events::Event> out;
  gen.advance(log_image(1, 1, 3.5 * c.c_pos), 1.0, out);
  REQUIRE(out.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(out[k].polarity == 1);
    CHECK(out[k].t == doctest::Approx((k + 1) / 3.5));
  }
  CHECK(gen.reference()[0] == doctest::Approx(3 * c.c_pos));
  // Falling back by 0.8: crossings of 0.6-0.25 = 0.35 and 0.1 during (1, 2].
  out.clear();
  gen.advance(log_image(1, 1, 3.5 * c.c_pos - 0.8), 2.0, out);
  REQUIRE(out.size() == 2);
  CHECK(out[0].polarity == -1);
  CHECK(out[0].t == doctest::Approx(1.0 + (0.7 - 0.35) / 0.8));
  CHECK(out[1].t == doctest::Approx(1.0 + (0.7 - 0.10) / 0.8));
}

TEST_CASE("event generator: inverted ramp flips every polarity") {
  const int n = 6;
  std::vector<Image> up, down;
  std::vector<double> times;
  for (int k = 0; k < n; ++k) {
    up.push_back(log_image(2, 1, 0.1 * k));
    down.push_back(log_image(2, 1, -0.1 * k));
    times.push_back(k * 0.01);
  }
  const auto a = generate_events_from_log(up, times, {0.12, 0.12});
  const auto b = generate_events_from_log(down, times, {0.12, 0.12});
  REQUIRE(a.events.size() == b.events.size());
  REQUIRE(!a.events.empty());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].polarity == 1);
    CHECK(b.events[i].polarity == -1);
    CHECK(a.events[i].t == doctest::Approx(b.events[i].t));
  }
  std::vector<double> bad = {0.0, 0.0, 0.1, 0.2, 0.3, 0.4};
  CHECK_THROWS_AS(generate_events_from_log(up, bad, {0.12, 0.12}), UsageError);
}

TEST_CASE("gt_flow and warp consistency") {
  const Homography a = Homography::identity();
  const FlowField zero = gt_flow(a, a, 8, 8);
  for (double d : zero.dx) CHECK(d == 0.0);
  const FlowField shift = gt_flow(a, Homography::translation(2, 0), 8, 8);
  for (std::size_t i = 0; i < shift.dx.size(); ++i) {
    CHECK(shift.dx[i] == doctest::Approx(-2.0));
    CHECK(shift.dy[i] == doctest::Approx(0.0).scale(1.0));
  }

  std::mt19937_64 rng(5);
  const Image tex = smooth_texture(rng, 96, 96);
  const Homography h0 = Homography::from_params(0, 0, 0.0, 0.0, 0.0, 31.5, 31.5);
  const Homography h1 = Homography::from_params(1.7, -0.9, 0.02, 0.01, 0.0, 31.5, 31.5);
  const Image f0 = render_frame(tex, h0, 64, 64), f1 = render_frame(tex, h1, 64, 64);
  const Image warped = losses::backward_warp(f0, gt_flow(h0, h1, 64, 64));
  double worst = 0;
  for (int y = 4; y < 60; ++y)
    for (int x = 4; x < 60; ++x) worst = std::max(worst, std::abs(warped.at(x, y) - f1.at(x, y)));
  CHECK(worst < 0.02);
}

TEST_CASE("simulate_sequence") {
  SimConfig cfg;
  cfg.seed = 4;
  const SimSequence s = simulate_sequence(cfg);
  CHECK(s.frames.size() == 25);
  CHECK(s.flows.size() == 24);
  CHECK(s.frame_times.back() == doctest::Approx(0.48));
  CHECK_NOTHROW(events::validate(s.events));
  CHECK_FALSE(s.events.events.empty());
  const SimSequence again = simulate_sequence(cfg);
  CHECK(again.events == s.events);
  CHECK(again.frames == s.frames);
  CHECK(again.flows == s.flows);

  SimConfig still = cfg;
  still.motion_scale = 0.0;
  const SimSequence z = simulate_sequence(still);
  CHECK(z.events.events.empty());
  for (const Image& f : z.frames) CHECK(f == z.frames.front());
}

TEST_CASE("dataset layout round-trip") {
  SimConfig cfg;
  cfg.width = 32;
  cfg.height = 24;
  cfg.duration = 0.2;
  cfg.seed = 2;
  const SimSequence s = simulate_sequence(cfg);
  const auto root = testing::temp_dir("dataset");
  write_dataset(std::span<const SimSequence>(&s, 1), root);
  const auto dir = root / "seq_0000";
  int pgm = 0, flw = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "frames")) pgm += e.path().extension() == ".pgm";
  for (const auto& e : std::filesystem::directory_iterator(dir / "flows")) flw += e.path().extension() == ".flw";
  CHECK(pgm == 10);
  CHECK(flw == 9);

  std::ifstream meta(dir / "meta.txt");
  std::stringstream ss;
  ss << meta.rdbuf();
  char expect[64];
  std::snprintf(expect, sizeof expect, "c_pos=%.6f", s.thresholds.c_pos);
  CHECK(ss.str().find(expect) != std::string::npos);

  const auto back = read_dataset(root);
  REQUIRE(back.size() == 1);
  const SimSequence q = quantized_like_disk(s);
  CHECK(back[0].events == s.events);
  CHECK(back[0].frames == q.frames);
  CHECK(back[0].flows == q.flows);
  REQUIRE(back[0].frame_times.size() == s.frame_times.size());
  for (std::size_t i = 0; i < s.frame_times.size(); ++i)
    CHECK(back[0].frame_times[i] == doctest::Approx(s.frame_times[i]).epsilon(1e-9));
}

TEST_CASE("flow and image codecs") {
  FlowField f(3, 2);
  for (std::size_t i = 0; i < f.dx.size(); ++i) {
    f.dx[i] = 0.25 * static_cast<double>(i);
    f.dy[i] = -0.5 * static_cast<double>(i);
  }
  CHECK(decode_flow(encode_flow(f)) == f);
  auto bytes = encode_flow(f);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_flow(bytes), DataError);

  const auto dir = testing::temp_dir("codecs");
  Image img(5, 3);
  for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = static_cast<double>(i) / 14.0;
  write_pgm(img, dir / "a.pgm");
  const Image back = read_pgm(dir / "a.pgm");
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(0.5 / 255));
}
