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

#include "e2v/sim/texture.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "e2v/common.hpp"

namespace e2v::sim {
namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// One octave of value noise on a (cells+1)^2 lattice, smoothstep-interpolated.
void add_octave(Image& img, std::mt19937_64& rng, int cells, double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = cells + 1;
  std::vector<double> lattice(static_cast<std::size_t>(n) * n);
  for (double& v : lattice) v = u(rng);
  const double sx = static_cast<double>(cells) / img.width;
  const double sy = static_cast<double>(cells) / img.height;
  for (int y = 0; y < img.height; ++y) {
    const double gy = (y + 0.5) * sy;
    const int iy = std::min(static_cast<int>(gy), cells - 1);
    const double fy = smoothstep(gy - iy);
    for (int x = 0; x < img.width; ++x) {
      const double gx = (x + 0.5) * sx;
      const int ix = std::min(static_cast<int>(gx), cells - 1);
      const double fx = smoothstep(gx - ix);
      const double a = lattice[iy * n + ix], b = lattice[iy * n + ix + 1];
      const double c = lattice[(iy + 1) * n + ix], d = lattice[(iy + 1) * n + ix + 1];
      img.at(x, y) += amplitude * ((a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy);
    }
  }
}

void normalize_range(Image& img, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(img.data.begin(), img.data.end());
  const double a = *mn, b = *mx;
  const double span = b - a > 1e-12 ? b - a : 1.0;
  for (double& v : img.data) v = lo + (hi - lo) * (v - a) / span;
}

}  // namespace

Image procedural_texture(std::mt19937_64& rng, const TextureOptions& options) {
  if (options.width < 2 || options.height < 2) throw UsageError("texture must be at least 2x2");
  Image img(options.width, options.height, 0.0);
  int cells = 4;
  double amp = 1.0;
  for (int o = 0; o < options.octaves; ++o) {
    add_octave(img, rng, cells, amp);
    cells *= 2;
    amp *= 0.5;
  }
  normalize_range(img, 0.1, 0.9);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int s = 0; s < options.shapes; ++s) {
    const bool disc = u01(rng) < 0.5;
    const double cx = u01(rng) * options.width;
    const double cy = u01(rng) * options.height;
    const double rx = (0.04 + 0.12 * u01(rng)) * options.width;
    const double ry = disc ? rx : (0.04 + 0.12 * u01(rng)) * options.height;
    const double value = u01(rng);
    for (int y = 0; y < options.height; ++y)
      for (int x = 0; x < options.width; ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) img.at(x, y) = (1.0 - options.shape_opacity) * img.at(x, y) + options.shape_opacity * value;
      }
  }
  for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
  return img;
}

Image smooth_texture(std::mt19937_64& rng, int width, int height) {
  Image img(width, height, 0.0);
  add_octave(img, rng, 3, 1.0);
  add_octave(img, rng, 6, 0.4);
  normalize_range(img, 0.15, 0.85);
  return img;
}

Image load_texture(const std::filesystem::path& path, int min_width, int min_height) {
  Image src = read_pgm(path);
  const double scale = std::max({1.0, static_cast<double>(min_width) / src.width,
                                 static_cast<double>(min_height) / src.height});
  if (scale == 1.0) return src;
  Image out(static_cast<int>(std::ceil(src.width * scale)), static_cast<int>(std::ceil(src.height * scale)));
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out.at(x, y) = src.sample_clamped((x + 0.5) / scale - 0.5, (y + 0.5) / scale - 0.5);
  return out;
}

}  // namespace e2v::sim
