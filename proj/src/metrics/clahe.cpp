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
#include <tuple>

#include "e2v/common.hpp"
#include "e2v/metrics/metrics.hpp"

namespace e2v::metrics {

namespace {

int bin_of(double v, int bins) {
  const int b = static_cast<int>(std::clamp(v, 0.0, 1.0) * bins);
  return std::min(b, bins - 1);
}

}  // namespace

Image local_hist_eq(const Image& image, const ClaheOptions& o) {
  if (o.tiles_x < 1 || o.tiles_y < 1 || o.bins < 2) throw UsageError("local_hist_eq: bad tile or bin count");
  if (image.width < 2 * o.tiles_x || image.height < 2 * o.tiles_y)
    throw UsageError("local_hist_eq: image smaller than 2x2 pixels per tile");

  const int tx = o.tiles_x, ty = o.tiles_y, nb = o.bins;
  auto x_edge = [&](int i) { return static_cast<int>(static_cast<long>(i) * image.width / tx); };
  auto y_edge = [&](int j) { return static_cast<int>(static_cast<long>(j) * image.height / ty); };

  // Per-tile lookup tables mapping a bin to an output level in [0,1].
  std::vector<double> lut(static_cast<std::size_t>(tx) * ty * nb);
  std::vector<double> hist(static_cast<std::size_t>(nb));
  for (int j = 0; j < ty; ++j)
    for (int i = 0; i < tx; ++i) {
      std::fill(hist.begin(), hist.end(), 0.0);
      const int x0 = x_edge(i), x1 = x_edge(i + 1), y0 = y_edge(j), y1 = y_edge(j + 1);
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) hist[bin_of(image.at(x, y), nb)] += 1.0;
      const double count = static_cast<double>(x1 - x0) * (y1 - y0);
      if (o.clip > 0.0) {
        const double limit = std::max(1.0, o.clip * count / nb);
        double excess = 0.0;
        for (double& h : hist)
          if (h > limit) {
            excess += h - limit;
            h = limit;
          }
        const double share = excess / nb;
        for (double& h : hist) h += share;
      }
      double cdf = 0.0;
      double* t = &lut[(static_cast<std::size_t>(j) * tx + i) * nb];
      for (int b = 0; b < nb; ++b) {
        cdf += hist[b];
        t[b] = std::clamp(cdf / count, 0.0, 1.0);
      }
    }

  auto tile_center = [](int lo, int hi) { return 0.5 * (lo + hi - 1); };
  // Neighbouring tile pair and blend weight along one axis.
  auto locate = [&](int p, int tiles, auto edge) {
    int k = 0;
    while (k + 1 < tiles && tile_center(edge(k + 1), edge(k + 2)) <= p) ++k;
    const double c0 = tile_center(edge(k), edge(k + 1));
    if (p <= c0 || k + 1 >= tiles) return std::tuple<int, int, double>(k, k, 0.0);
    const double c1 = tile_center(edge(k + 1), edge(k + 2));
    return std::tuple<int, int, double>(k, k + 1, (p - c0) / (c1 - c0));
  };

  Image out(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    const auto [j0, j1, fy] = locate(y, ty, y_edge);
    for (int x = 0; x < image.width; ++x) {
      const auto [i0, i1, fx] = locate(x, tx, x_edge);
      const int b = bin_of(image.at(x, y), nb);
      auto L = [&](int i, int j) { return lut[(static_cast<std::size_t>(j) * tx + i) * nb + b]; };
      const double top = L(i0, j0) + fx * (L(i1, j0) - L(i0, j0));
      const double bottom = L(i0, j1) + fx * (L(i1, j1) - L(i0, j1));
      out.at(x, y) = std::clamp(top + fy * (bottom - top), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace e2v::metrics
