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

using namespace e2v;
using namespace e2v::losses;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(w, h);
  for (double& v : img.data) v = u(rng);
  return img;
}

FlowField constant_flow(int w, int h, double dx, double dy) {
  FlowField f(w, h);
  std::fill(f.dx.begin(), f.dx.end(), dx);
  std::fill(f.dy.begin(), f.dy.end(), dy);
  return f;
}

}  // namespace

TEST_CASE("backward_warp") {
  std::mt19937_64 rng(1);
  const Image img = random_image(rng, 7, 5);
  CHECK(backward_warp(img, FlowField(7, 5)) == img);

  Image ramp(6, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 6; ++x) ramp.at(x, y) = 0.1 * x;
  const Image shifted = backward_warp(ramp, constant_flow(6, 3, -1.0, 0.0));
  for (int x = 1; x < 6; ++x) CHECK(shifted.at(x, 1) == doctest::Approx(ramp.at(x, 1) - 0.1));
  CHECK(shifted.at(0, 1) == ramp.at(0, 1));  // clamped sample position

  const Image half = backward_warp(ramp, constant_flow(6, 3, 0.5, 0.0));
  CHECK(half.at(2, 0) == doctest::Approx(0.25));
}

TEST_CASE("graph backward_warp matches the image version") {
  std::mt19937_64 rng(2);
  const Image img = random_image(rng, 6, 4);
  FlowField flow(6, 4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    flow.dx[i] = u(rng);
    flow.dy[i] = u(rng);
  }
  nn::Tensor<double> t({1, 1, 4, 6});
  t.data = img.data;
  nn::Graph<double> g(false);
  const nn::Var w = backward_warp(g, g.constant(t), std::span<const FlowField>(&flow, 1));
  const Image ref = backward_warp(img, flow);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(g.value(w).data[i] == doctest::Approx(ref.data[i]));
}

TEST_CASE("occlusion mask") {
  Image a(3, 1, 0.5), b(3, 1, 0.5);
  const FlowField zero(3, 1);
  for (double m : occlusion_mask(a, b, zero, 50.0).data) CHECK(m == 1.0);
  a.data = {1.0, 0.6, 0.7};
  b.data = {0.0, 0.5, 0.5};
  const Image m = occlusion_mask(a, b, zero, 50.0);
  CHECK(m.data[0] == doctest::Approx(std::exp(-50.0)));
  CHECK(m.data[1] > m.data[2]);
  CHECK(m.data[1] == doctest::Approx(std::exp(-50.0 * 0.01)));
}

TEST_CASE("temporal loss") {
  std::mt19937_64 rng(3);
  const Image prev = random_image(rng, 3, 3);
  const FlowField flow = constant_flow(3, 3, 0.3, -0.2);
  const Image cur = backward_warp(prev, flow);
  CHECK(temporal_loss(cur, prev, flow, Image(3, 3, 1.0)) == doctest::Approx(0.0).scale(1.0));

  const Image other = random_image(rng, 3, 3);
  CHECK(temporal_loss(other, prev, flow, Image(3, 3, 0.0)) == 0.0);

  const Image mask = random_image(rng, 3, 3);
  const Image warped = backward_warp(prev, flow);
  double direct = 0.0;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) direct += mask.at(x, y) * std::abs(other.at(x, y) - warped.at(x, y));
  CHECK(temporal_loss(other, prev, flow, mask) == doctest::Approx(direct / 9.0).epsilon(1e-14));

  // Homogeneity: doubling every per-pixel difference doubles the loss.
  Image doubled = other;
  for (std::size_t i = 0; i < doubled.size(); ++i) doubled.data[i] = warped.data[i] + 2.0 * (other.data[i] - warped.data[i]);
  CHECK(temporal_loss(doubled, prev, flow, mask) == doctest::Approx(2.0 * direct / 9.0).epsilon(1e-12));
}

TEST_CASE("reconstruction loss") {
  std::mt19937_64 rng(4);
  const Image a = random_image(rng, 5, 4), b = random_image(rng, 5, 4);
  CHECK(reconstruction_loss(a, a, ReconstructionKind::L1) == 0.0);
  CHECK(reconstruction_loss(Image(3, 3, 0.0), Image(3, 3, 1.0), ReconstructionKind::L1) == 1.0);
  CHECK(reconstruction_loss(Image(3, 3, 0.0), Image(3, 3, 1.0), ReconstructionKind::MSE) == 1.0);
  double l1 = 0, l2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    l1 += std::abs(a.data[i] - b.data[i]);
    l2 += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  }
  CHECK(reconstruction_loss(a, b, ReconstructionKind::L1) == doctest::Approx(l1 / 20));
  CHECK(reconstruction_loss(a, b, ReconstructionKind::MSE) == doctest::Approx(l2 / 20));
}

TEST_CASE("total loss") {
  const double rec[] = {0.5, 0.25, 0.125};
  const double tc[] = {9.0, 0.3, 0.2};
  LossConfig cfg;
  cfg.l0 = 2;
  cfg.lambda_tc = 5.0;
  CHECK(total_loss(rec, tc, cfg) == doctest::Approx(0.875 + 5.0 * 0.2));
  cfg.l0 = 1;
  CHECK(total_loss(rec, tc, cfg) == doctest::Approx(0.875 + 5.0 * 0.5));
  cfg.lambda_tc = 0.0;
  CHECK(total_loss(rec, tc, cfg) == doctest::Approx(0.875));
  const double zeros[] = {0, 0, 0};
  CHECK(total_loss(zeros, zeros, LossConfig{}) == 0.0);

  LossConfig lin;
  lin.l0 = 0;
  lin.lambda_tc = 1.0;
  const double base = total_loss(rec, tc, lin);
  lin.lambda_tc = 3.0;
  CHECK(total_loss(rec, tc, lin) - base == doctest::Approx(2.0 * (9.0 + 0.3 + 0.2)));

  LossConfig bad;
  bad.lambda_tc = -1.0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}
