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

#include "e2v/pipeline/color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "e2v/common.hpp"
#include "e2v/metrics/metrics.hpp"
#include "e2v/parallel.hpp"

namespace e2v::pipeline {

namespace {

double catmull_rom(double t, int tap) {
  // Weights for taps at -1, 0, 1, 2 with a = -0.5.
  const double t2 = t * t, t3 = t2 * t;
  switch (tap) {
    case 0: return -0.5 * t3 + t2 - 0.5 * t;
    case 1: return 1.5 * t3 - 2.5 * t2 + 1.0;
    case 2: return -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    default: return 0.5 * t3 - 0.5 * t2;
  }
}

// sRGB primaries, D65 white.
constexpr double kRgbToXyz[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                                    {0.2126729, 0.7151522, 0.0721750},
                                    {0.0193339, 0.1191920, 0.9503041}};
// Reference white = XYZ of RGB (1,1,1), so neutral grays get a = b = 0.
constexpr double kWhite[3] = {kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
                              kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
                              kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2]};
constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

struct Inverse3 {
  double m[3][3];
  Inverse3() {
    const auto& a = kRgbToXyz;
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  }
};

const Inverse3& xyz_to_rgb() {
  static const Inverse3 inv;
  return inv;
}

double srgb_to_linear(double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); }
double linear_to_srgb(double v) { return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055; }
double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }
double lab_f_inv(double f) {
  const double f3 = f * f * f;
  return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

}  // namespace

Image upsample_bicubic2x(const Image& image) {
  const int W = image.width, H = image.height;
  Image out(2 * W, 2 * H);
  auto px = [&](int x, int y) { return image.at(std::clamp(x, 0, W - 1), std::clamp(y, 0, H - 1)); };
  for (int oy = 0; oy < out.height; ++oy) {
    const double sy = (oy + 0.5) / 2.0 - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    const double ty = sy - y0;
    for (int ox = 0; ox < out.width; ++ox) {
      const double sx = (ox + 0.5) / 2.0 - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const double tx = sx - x0;
      double v = 0.0;
      for (int j = 0; j < 4; ++j) {
        double row = 0.0;
        for (int i = 0; i < 4; ++i) row += catmull_rom(tx, i) * px(x0 - 1 + i, y0 - 1 + j);
        v += catmull_rom(ty, j) * row;
      }
      out.at(ox, oy) = v;
    }
  }
  return out;
}

std::array<double, 3> rgb_to_lab(const std::array<double, 3>& rgb) {
  double lin[3], xyz[3];
  for (int c = 0; c < 3; ++c) lin[c] = srgb_to_linear(rgb[c]);
  for (int r = 0; r < 3; ++r) xyz[r] = kRgbToXyz[r][0] * lin[0] + kRgbToXyz[r][1] * lin[1] + kRgbToXyz[r][2] * lin[2];
  const double fx = lab_f(xyz[0] / kWhite[0]), fy = lab_f(xyz[1] / kWhite[1]), fz = lab_f(xyz[2] / kWhite[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<double, 3> lab_to_rgb(const std::array<double, 3>& lab) {
  const double fy = (lab[0] + 16.0) / 116.0;
  const double fx = fy + lab[1] / 500.0;
  const double fz = fy - lab[2] / 200.0;
  const double xyz[3] = {kWhite[0] * lab_f_inv(fx), kWhite[1] * lab_f_inv(fy), kWhite[2] * lab_f_inv(fz)};
  const auto& m = xyz_to_rgb().m;
  std::array<double, 3> rgb;
  for (int r = 0; r < 3; ++r) rgb[r] = linear_to_srgb(m[r][0] * xyz[0] + m[r][1] * xyz[1] + m[r][2] * xyz[2]);
  return rgb;
}

RgbImage fuse_luminance(const Image& red, const Image& green, const Image& blue, const Image& luminance) {
  if (!red.same_shape(green) || !red.same_shape(blue) || !red.same_shape(luminance))
    throw UsageError("fuse_luminance: plane sizes differ");
  RgbImage out(red.width, red.height);
  for (std::size_t i = 0; i < red.size(); ++i) {
    auto lab = rgb_to_lab({std::clamp(red.data[i], 0.0, 1.0), std::clamp(green.data[i], 0.0, 1.0),
                           std::clamp(blue.data[i], 0.0, 1.0)});
    lab[0] = 100.0 * std::clamp(luminance.data[i], 0.0, 1.0);
    const auto rgb = lab_to_rgb(lab);
    for (int c = 0; c < 3; ++c) out.channels[c][i] = std::clamp(rgb[c], 0.0, 1.0);
  }
  return out;
}

std::vector<ColorFrame> color_reconstruct(const events::EventStream& stream, nn::ModelWeights<float>& weights,
                                          const nn::NetworkConfig& config, const events::CfaPattern& pattern,
                                          const WindowPolicy& policy, const PostprocessOptions& post) {
  const auto channels = events::split_cfa(stream, pattern);
  WindowPolicy channel_policy = policy;
  if (policy.kind == WindowPolicy::Kind::Count) channel_policy.count = std::max<std::size_t>(1, policy.count / 4);
  if (policy.kind == WindowPolicy::Kind::Duration && !policy.origin && !stream.events.empty())
    channel_policy.origin = stream.events.front().t;

  // Index 4 is the full-resolution grayscale reconstruction.
  std::array<std::vector<Frame>, 5> runs;
  parallel_for(5, [&](std::size_t c) {
    if (c == 4) {
      Reconstructor r(weights, config, channel_policy.kind == WindowPolicy::Kind::Duration ? channel_policy : policy,
                      post);
      runs[4] = reconstruct_stream(stream, r);
    } else {
      Reconstructor r(weights, config, channel_policy, post);
      runs[c] = reconstruct_stream(channels[c], r);
    }
  });

  std::vector<ColorFrame> out;
  for (const Frame& gray : runs[4]) {
    std::array<Image, 4> up;
    bool complete = true;
    for (std::size_t c = 0; c < 4; ++c) {
      const int idx = metrics::match_nearest(runs[c], gray.timestamp, std::numeric_limits<double>::infinity());
      if (idx < 0) {
        complete = false;
        break;
      }
      up[c] = upsample_bicubic2x(runs[c][static_cast<std::size_t>(idx)].image);
    }
    if (!complete) continue;
    Image green(up[1].width, up[1].height);
    for (std::size_t i = 0; i < green.size(); ++i) green.data[i] = 0.5 * (up[1].data[i] + up[2].data[i]);
    out.push_back({gray.timestamp, fuse_luminance(up[0], green, up[3], gray.image)});
  }
  return out;
}

}  // namespace e2v::pipeline
