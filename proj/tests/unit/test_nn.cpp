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
#include "e2v/nn/adam.hpp"
#include "e2v/nn/checkpoint.hpp"
#include "e2v/nn/gradcheck.hpp"
#include "e2v/nn/network.hpp"
#include "e2v/simd/kernels.hpp"

using namespace e2v;
using namespace e2v::nn;

namespace {

template <typename T>
Tensor<T> random_tensor(std::mt19937_64& rng, Shape s, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<T> t(s);
  for (T& v : t.data) v = static_cast<T>(u(rng));
  return t;
}

// Direct-summation cross-correlation with zero padding.
Tensor<double> conv_oracle(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>* b, int stride,
                           int pad) {
  const int k = w.shape.h;
  const int oh = (x.shape.h + 2 * pad - k) / stride + 1, ow = (x.shape.w + 2 * pad - k) / stride + 1;
  Tensor<double> out({x.shape.n, w.shape.n, oh, ow});
  for (int n = 0; n < x.shape.n; ++n)
    for (int co = 0; co < w.shape.n; ++co)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          double s = b ? b->data[co] : 0.0;
          for (int ci = 0; ci < x.shape.c; ++ci)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                const int iy = oy * stride + ky - pad, ix = ox * stride + kx - pad;
                if (iy < 0 || ix < 0 || iy >= x.shape.h || ix >= x.shape.w) continue;
                s += x.at(n, ci, iy, ix) * w.at(co, ci, ky, kx);
              }
          out.at(n, co, oy, ox) = s;
        }
  return out;
}

NetworkConfig tiny_config() {
  NetworkConfig c;
  c.num_encoders = 2;
  c.num_residual = 1;
  c.base_channels = 4;
  c.input_bins = 5;
  c.unroll = 8;
  return c;
}

}  // namespace

TEST_CASE("conv2d matches direct summation") {
  std::mt19937_64 rng(1);
  for (auto [stride, k] : {std::pair{1, 3}, {2, 5}, {1, 5}, {2, 3}, {1, 1}}) {
    CAPTURE(stride);
    CAPTURE(k);
    const auto x = random_tensor<double>(rng, {2, 3, 9, 7});
    const auto w = random_tensor<double>(rng, {4, 3, k, k});
    const auto b = random_tensor<double>(rng, {1, 4, 1, 1});
    Graph<double> g(false);
    const Var y = conv2d(g, g.constant(x), g.constant(w), g.constant(b), stride, k / 2);
    const auto ref = conv_oracle(x, w, &b, stride, k / 2);
    REQUIRE(g.shape(y) == ref.shape);
    CHECK(g.shape(y).h == (9 + stride - 1) / stride);
    for (std::size_t i = 0; i < ref.numel(); ++i) CHECK(g.value(y).data[i] == doctest::Approx(ref.data[i]));
  }
}

TEST_CASE("conv2d: identity 1x1 kernel and zero input") {
  std::mt19937_64 rng(2);
  const auto x = random_tensor<float>(rng, {1, 3, 5, 5});
  Tensor<float> w({3, 3, 1, 1});
  for (int c = 0; c < 3; ++c) w.at(c, c, 0, 0) = 1.0f;
  Graph<float> g(false);
  CHECK(g.value(conv2d(g, g.constant(x), g.constant(w), Var{}, 1, 0)) == x);

  Tensor<float> b({1, 3, 1, 1});
  b.data = {0.5f, -1.0f, 2.0f};
  const Var z = conv2d(g, g.constant(Tensor<float>({1, 3, 5, 5})), g.constant(random_tensor<float>(rng, {3, 3, 3, 3})),
                       g.constant(b), 1, 1);
  for (int c = 0; c < 3; ++c) CHECK(g.value(z).at(0, c, 2, 3) == b.data[c]);
}

TEST_CASE("conv2d forward and backward agree between kernel variants") {
  if (!simd::avx2_kernels() || !simd::cpu_supports_avx2()) return;
  std::mt19937_64 rng(3);
  const auto x = random_tensor<float>(rng, {2, 6, 13, 11});
  const auto w = random_tensor<float>(rng, {8, 6, 3, 3});
  const auto seed = random_tensor<float>(rng, {2, 8, 7, 6});
  auto run = [&](simd::Isa isa) {
    simd::select(isa);
    Graph<float> g;
    const Var vx = g.leaf(x), vw = g.leaf(w);
    const Var y = conv2d(g, vx, vw, Var{}, 2, 1);
    g.backward(y, seed);
    return std::tuple{g.value(y), g.grad(vx), g.grad(vw)};
  };
  const simd::Isa before = simd::active().isa;
  const auto [ys, gxs, gws] = run(simd::Isa::Scalar);
  const auto [ya, gxa, gwa] = run(simd::Isa::Avx2);
  simd::select(before);
  for (std::size_t i = 0; i < ys.numel(); ++i) CHECK(ya.data[i] == doctest::Approx(ys.data[i]).epsilon(1e-5));
  for (std::size_t i = 0; i < gxs.numel(); ++i) CHECK(gxa.data[i] == doctest::Approx(gxs.data[i]).epsilon(1e-5));
  for (std::size_t i = 0; i < gws.numel(); ++i) CHECK(gwa.data[i] == doctest::Approx(gws.data[i]).epsilon(1e-4));
}

TEST_CASE("convlstm step with zero weights") {
  std::mt19937_64 rng(4);
  Graph<double> g(false);
  const auto x = random_tensor<double>(rng, {1, 2, 4, 4});
  const auto c_prev = random_tensor<double>(rng, {1, 2, 4, 4});
  const Var w = g.constant(Tensor<double>({8, 4, 3, 3})), b = g.constant(Tensor<double>({1, 8, 1, 1}));
  const auto [h, c] = convlstm_step(g, g.constant(x), g.constant(Tensor<double>({1, 2, 4, 4})), g.constant(c_prev), w, b);
  for (std::size_t i = 0; i < c_prev.numel(); ++i) {
    CHECK(g.value(c).data[i] == doctest::Approx(0.5 * c_prev.data[i]));
    CHECK(g.value(h).data[i] == doctest::Approx(0.5 * std::tanh(0.5 * c_prev.data[i])));
  }
  const auto [h0, c0] = convlstm_step(g, g.constant(Tensor<double>({1, 2, 4, 4})), Var{}, Var{},
                                      g.constant(random_tensor<double>(rng, {8, 4, 3, 3})), Var{});
  for (double v : g.value(h0).data) CHECK(v == 0.0);
  for (double v : g.value(c0).data) CHECK(v == 0.0);
}

TEST_CASE("batch norm") {
  std::mt19937_64 rng(5);
  Tensor<double> gamma({1, 2, 1, 1}, 1.0), beta({1, 2, 1, 1}, 0.0);
  Tensor<double> rm({1, 2, 1, 1}, 0.0), rv({1, 2, 1, 1}, 1.0);
  Graph<double> g(false);
  BatchNormParams<double> bn{g.constant(gamma), g.constant(beta), &rm, &rv};

  SUBCASE("standardized input passes through") {
    Tensor<double> x({2, 2, 1, 2});
    x.data = {-1, 1, -1, 1, 1, -1, 1, -1};
    const Var y = batch_norm(g, g.constant(x), bn, Mode::Train);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(g.value(y).data[i] == doctest::Approx(x.data[i]).epsilon(1e-4));
    CHECK(rm.data[0] == doctest::Approx(0.0).scale(1.0));
    // unbiased variance 4/3 mixed in with momentum 0.1
    CHECK(rv.data[0] == doctest::Approx(0.9 + 0.1 * 4.0 / 3.0));
  }
  SUBCASE("constant channel maps to the shift") {
    Tensor<double> shift({1, 2, 1, 1});
    shift.data = {0.3, -0.7};
    BatchNormParams<double> bn2{g.constant(gamma), g.constant(shift), &rm, &rv};
    const Var y = batch_norm(g, g.constant(Tensor<double>({2, 2, 3, 3}, 4.0)), bn2, Mode::Train);
    CHECK(g.value(y).at(1, 0, 2, 2) == doctest::Approx(0.3));
    CHECK(g.value(y).at(0, 1, 0, 1) == doctest::Approx(-0.7));
  }
  SUBCASE("eval mode uses running statistics") {
    rm.data = {1.0, 2.0};
    rv.data = {4.0, 9.0};
    Tensor<double> x({1, 2, 1, 1});
    x.data = {3.0, 2.0};
    const Var y = batch_norm(g, g.constant(x), bn, Mode::Eval);
    CHECK(g.value(y).data[0] == doctest::Approx(2.0 / std::sqrt(4.0 + 1e-5)));
    CHECK(g.value(y).data[1] == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("bilinear upsample") {
  Graph<double> g(false);
  const Var c = upsample_bilinear2x(g, g.constant(Tensor<double>({1, 1, 3, 4}, 0.25)));
  CHECK(g.shape(c) == Shape{1, 1, 6, 8});
  for (double v : g.value(c).data) CHECK(v == doctest::Approx(0.25));

  // Adjoint check: <U x, y> = <x, U^T y> with U^T taken from the backward pass.
  std::mt19937_64 rng(6);
  const auto x = random_tensor<double>(rng, {1, 2, 3, 5});
  const auto y = random_tensor<double>(rng, {1, 2, 6, 10});
  Graph<double> gg;
  const Var vx = gg.leaf(x);
  const Var up = upsample_bilinear2x(gg, vx);
  gg.backward(up, y);
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < y.numel(); ++i) lhs += gg.value(up).data[i] * y.data[i];
  const auto gx = gg.grad(vx);
  for (std::size_t i = 0; i < x.numel(); ++i) rhs += x.data[i] * gx.data[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  // Box-averaging a linear ramp's upsampling restores the ramp on the interior.
  Tensor<double> ramp({1, 1, 1, 6});
  for (int i = 0; i < 6; ++i) ramp.data[i] = i;
  const Var r = upsample_bilinear2x(g, g.constant(ramp));
  for (int i = 1; i < 5; ++i) {
    const double avg = 0.5 * (g.value(r).at(0, 0, 0, 2 * i) + g.value(r).at(0, 0, 0, 2 * i + 1));
    CHECK(avg == doctest::Approx(ramp.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("residual block with zero convolutions") {
  std::mt19937_64 rng(7);
  Tensor<double> shift({1, 3, 1, 1});
  shift.data = {0.2, -5.0, 0.0};
  Tensor<double> ones({1, 3, 1, 1}, 1.0), zeros({1, 3, 1, 1}, 0.0);
  Tensor<double> rm1 = zeros, rv1 = ones, rm2 = zeros, rv2 = ones;
  Graph<double> g(false);
  const auto x = random_tensor<double>(rng, {2, 3, 4, 4}, 0.0, 1.0);
  const Var w = g.constant(Tensor<double>({3, 3, 3, 3}));
  BatchNormParams<double> bn1{g.constant(ones), g.constant(zeros), &rm1, &rv1};
  BatchNormParams<double> bn2{g.constant(ones), g.constant(shift), &rm2, &rv2};
  const Var y = residual_block(g, g.constant(x), w, bn1, w, bn2, Mode::Train);
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 4; ++i)
        CHECK(g.value(y).at(n, c, i, i) == doctest::Approx(std::max(0.0, x.at(n, c, i, i) + shift.data[c])));
}

TEST_CASE("network structure") {
  const NetworkConfig cfg = tiny_config();
  CHECK(encoder_channels(cfg, 1) == 8);
  CHECK(encoder_channels(cfg, 2) == 16);
  auto w = init_weights<float>(cfg, 3);
  CHECK_NOTHROW(check_weights(w, cfg));
  CHECK(w.params.at("encoders.0.lstm.gates.bias").data[8 + 3] == 1.0f);  // forget gate
  NetworkConfig bigger = cfg;
  bigger.base_channels = 8;
  CHECK(init_weights<float>(bigger, 3).parameter_count() > w.parameter_count());
  bigger.num_encoders = 3;
  CHECK_THROWS_AS(check_weights(w, bigger), UsageError);
  NetworkConfig bad = cfg;
  bad.num_encoders = 0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("network forward: range, purity and state") {
  const NetworkConfig cfg = tiny_config();
  auto w = init_weights<float>(cfg, 3);
  std::mt19937_64 rng(8);
  const auto input = random_tensor<float>(rng, {1, 5, 16, 20});
  const auto [img, state] = e2vid_forward(input, {}, w, cfg, Mode::Eval);
  CHECK(img.shape == Shape{1, 1, 16, 20});
  for (float v : img.data) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
  const auto [img2, state2] = e2vid_forward(input, {}, w, cfg, Mode::Eval);
  CHECK(img2 == img);
  REQUIRE(state.hidden.size() == 2);
  const auto [img3, state3] = e2vid_forward(input, state, w, cfg, Mode::Eval);
  CHECK_FALSE(img3 == img);

  NetworkConfig stateless = cfg;
  stateless.recurrent = false;
  const auto [img4, state4] = e2vid_forward(input, state, w, stateless, Mode::Eval);
  CHECK(img4 == img);

  const auto zeros = Tensor<float>({1, 5, 16, 20});
  CHECK(e2vid_forward(zeros, {}, w, cfg, Mode::Eval).first == e2vid_forward(zeros, {}, w, cfg, Mode::Eval).first);

  NetworkConfig concat = cfg;
  concat.skip = SkipMode::Concat;
  auto wc = init_weights<float>(concat, 3);
  CHECK(e2vid_forward(input, {}, wc, concat, Mode::Eval).first.shape == img.shape);
}

TEST_CASE("adam") {
  SUBCASE("zero gradients leave weights unchanged") {
    std::map<std::string, Tensor<float>> p{{"w", Tensor<float>({1, 1, 1, 3}, 0.5f)}};
    std::map<std::string, Tensor<float>> g{{"w", Tensor<float>({1, 1, 1, 3})}};
    AdamState<float> st;
    adam_step(p, g, st, {});
    for (float v : p["w"].data) CHECK(v == 0.5f);
  }
  SUBCASE("first step moves by lr along -sign(g)") {
    std::map<std::string, Tensor<float>> p{{"w", Tensor<float>({1, 1, 1, 2}, 1.0f)}};
    std::map<std::string, Tensor<float>> g{{"w", Tensor<float>({1, 1, 1, 2})}};
    g["w"].data = {3.0f, -0.01f};
    AdamState<float> st;
    adam_step(p, g, st, {.lr = 0.01});
    CHECK(p["w"].data[0] == doctest::Approx(0.99).epsilon(1e-5));
    CHECK(p["w"].data[1] == doctest::Approx(1.01).epsilon(1e-5));
  }
  SUBCASE("quadratic: matches a scalar trace; |w| falls until the first sign change") {
    std::map<std::string, Tensor<double>> p{{"w", Tensor<double>({1, 1, 1, 1}, 1.0)}};
    AdamState<double> st;
    double w = 1.0, m = 0.0, v = 0.0, prev = 1.0;
    for (int t = 1; t <= 20; ++t) {
      std::map<std::string, Tensor<double>> g{{"w", Tensor<double>({1, 1, 1, 1}, 2.0 * p["w"].data[0])}};
      adam_step(p, g, st, {.lr = 0.1});
      const double gr = 2.0 * w;
      m = 0.9 * m + 0.1 * gr;
      v = 0.999 * v + 0.001 * gr * gr;
      w -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
      CHECK(p["w"].data[0] == doctest::Approx(w).epsilon(1e-12));
      // Momentum carries w through zero at step 12 with these constants.
      if (t <= 11) CHECK(std::abs(p["w"].data[0]) < prev);
      prev = std::abs(p["w"].data[0]);
    }
  }
  SUBCASE("non-finite gradient aborts before any update") {
    std::map<std::string, Tensor<float>> p{{"a", Tensor<float>({1, 1, 1, 1}, 1.0f)},
                                           {"b", Tensor<float>({1, 1, 1, 1}, 1.0f)}};
    std::map<std::string, Tensor<float>> g{{"a", Tensor<float>({1, 1, 1, 1}, 1.0f)},
                                           {"b", Tensor<float>({1, 1, 1, 1}, NAN)}};
    AdamState<float> st;
    CHECK_THROWS_AS(adam_step(p, g, st, {}), NumericError);
    CHECK(p["a"].data[0] == 1.0f);
    CHECK(st.step == 0);
  }
}

TEST_CASE("checkpoint") {
  Checkpoint ck;
  ck.config = tiny_config();
  ck.weights = init_weights<float>(ck.config, 9);
  ck.metadata["epochs_done"] = "3";
  AdamState<float> st;
  st.step = 12;
  for (const auto& [k, v] : ck.weights.params) {
    st.m[k] = Tensor<float>(v.shape, 0.25f);
    st.v[k] = Tensor<float>(v.shape, 0.5f);
  }
  ck.optimizer = st;
  const auto bytes = save_checkpoint(ck);
  const Checkpoint back = load_checkpoint(bytes);
  CHECK(back.config == ck.config);
  CHECK(back.weights.params == ck.weights.params);
  CHECK(back.weights.buffers == ck.weights.buffers);
  CHECK(back.metadata == ck.metadata);
  REQUIRE(back.optimizer.has_value());
  CHECK(back.optimizer->step == 12);
  CHECK(back.optimizer->m == st.m);

  auto truncated = bytes;
  truncated.resize(bytes.size() - 100);
  CHECK_THROWS_AS(load_checkpoint(truncated), DataError);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK_THROWS_AS(load_checkpoint(flipped), DataError);

  NetworkConfig other = ck.config;
  other.num_encoders = 3;
  try {
    load_checkpoint(bytes, other);
    FAIL("expected a config mismatch");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("num_encoders") != std::string::npos);
  }
}

TEST_CASE("gradient_check detects a wrong backward") {
  std::mt19937_64 rng(10);
  const auto x = random_tensor<double>(rng, {1, 1, 3, 3});
  auto good = [](Graph<double>& g, std::span<const Var> in) { return tanh(g, in[0]); };
  CHECK(gradient_check(good, {{"x", x}}, 1).max_rel_error < 1e-7);
  auto bad = [](Graph<double>& g, std::span<const Var> in) {
    const Var a = in[0];
    Tensor<double> v = g.value(a);
    for (double& e : v.data) e = e * e;
    return g.record(std::move(v), {a}, [a](Graph<double>& gg, Var self) {
      const Tensor<double> gy = gg.grad(self);
      Tensor<double>& gx = gg.grad_buffer(a);
      for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] += gy.data[i];  // should be 2x * gy
    });
  };
  CHECK(gradient_check(bad, {{"x", x}}, 1).max_rel_error > 1e-2);
}
