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

#include "e2v/train/samples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "e2v/common.hpp"
#include "e2v/events/windowing.hpp"

namespace e2v::train {

namespace {

events::EventTensor encode(const events::EventWindow& w, int bins, int height, int width) {
  if (w.empty()) return events::EventTensor::zeros(bins, height, width);
  events::EventTensor t = events::encode_voxel_grid(w, bins, height, width);
  events::normalize_tensor(t);
  return t;
}

std::size_t nearest_frame(std::span<const double> times, double t) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return times.size() - 1;
  const auto i = static_cast<std::size_t>(it - times.begin());
  if (i > 0 && t - times[i - 1] <= *it - t) return i - 1;
  return i;
}

double sample_zero(const double* data, int width, int height, double x, double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const double fx = x - fx0, fy = y - fy0;
  double s = 0.0;
  auto tap = [&](int xi, int yi, double w) {
    if (w == 0.0 || xi < 0 || yi < 0 || xi >= width || yi >= height) return;
    s += w * data[static_cast<std::size_t>(yi) * width + xi];
  };
  tap(x0, y0, (1 - fx) * (1 - fy));
  tap(x0 + 1, y0, fx * (1 - fy));
  tap(x0, y0 + 1, (1 - fx) * fy);
  tap(x0 + 1, y0 + 1, fx * fy);
  return s;
}

struct Affine {
  double inv[2][2];  // R^-1
  double fwd[2][2];  // R
  double cx, cy;
  int ox, oy;

  explicit Affine(const Augmentation& a, int width, int height) {
    const double c = std::cos(a.angle_rad), s = std::sin(a.angle_rad);
    const double fh = a.flip_h ? -1.0 : 1.0, fv = a.flip_v ? -1.0 : 1.0;
    // R = diag(fh, fv) * Rot(theta); R^-1 = Rot(-theta) * diag(fh, fv).
    fwd[0][0] = fh * c;
    fwd[0][1] = -fh * s;
    fwd[1][0] = fv * s;
    fwd[1][1] = fv * c;
    inv[0][0] = c * fh;
    inv[0][1] = s * fv;
    inv[1][0] = -s * fh;
    inv[1][1] = c * fv;
    cx = (width - 1) / 2.0;
    cy = (height - 1) / 2.0;
    ox = a.crop_x;
    oy = a.crop_y;
  }

  void source(int x, int y, double& qx, double& qy) const {
    const double px = x + ox - cx, py = y + oy - cy;
    qx = cx + inv[0][0] * px + inv[0][1] * py;
    qy = cy + inv[1][0] * px + inv[1][1] * py;
  }
};

bool is_identity(const Augmentation& a, int width, int height) {
  return a.angle_rad == 0.0 && !a.flip_h && !a.flip_v && a.crop_x == 0 && a.crop_y == 0 && a.out_width == width &&
         a.out_height == height;
}

}  // namespace

WindowedSequence window_sequence(const sim::SimSequence& seq, int bins, WindowMode mode, int window_events) {
  const auto& times = seq.frame_times;
  if (seq.frames.size() != times.size() || seq.frames.size() < 2)
    throw DataError("sequence needs at least two ground-truth frames");
  if (seq.flows.size() + 1 != seq.frames.size()) throw DataError("sequence needs one flow per consecutive frame pair");
  const int W = seq.events.width, H = seq.events.height;
  WindowedSequence out;
  const std::span<const events::Event> all(seq.events.events);

  if (mode == WindowMode::Frames) {
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const auto lo = std::lower_bound(all.begin(), all.end(), times[k],
                                       [](const events::Event& e, double t) { return e.t < t; });
      const bool last = k + 2 == times.size();
      const auto hi = last ? std::upper_bound(all.begin(), all.end(), times[k + 1],
                                              [](double t, const events::Event& e) { return t < e.t; })
                           : std::lower_bound(all.begin(), all.end(), times[k + 1],
                                              [](const events::Event& e, double t) { return e.t < t; });
      const events::EventWindow w{all.subspan(static_cast<std::size_t>(lo - all.begin()),
                                              static_cast<std::size_t>(hi - lo)),
                                  times[k], times[k + 1]};
      out.tensors.push_back(encode(w, bins, H, W));
      out.targets.push_back(seq.frames[k + 1]);
      out.timestamps.push_back(times[k + 1]);
      if (k > 0) out.flows.push_back(seq.flows[k]);
    }
    return out;
  }

  std::vector<std::size_t> idx;
  for (const auto& w : events::window_by_count(seq.events, static_cast<std::size_t>(window_events))) {
    const std::size_t i = nearest_frame(times, w.t_end);
    out.tensors.push_back(encode(w, bins, H, W));
    out.targets.push_back(seq.frames[i]);
    out.timestamps.push_back(times[i]);
    if (!idx.empty()) out.flows.push_back(compose_flows(seq.flows, idx.back(), i));
    idx.push_back(i);
  }
  return out;
}

std::vector<TrainSample> make_samples(const WindowedSequence& seq, int unroll) {
  if (unroll < 1) throw UsageError("unroll must be >= 1");
  std::vector<TrainSample> out;
  const auto L = static_cast<std::size_t>(unroll);
  for (std::size_t s = 0; s + L <= seq.tensors.size(); s += L) {
    TrainSample sample;
    sample.tensors.assign(seq.tensors.begin() + s, seq.tensors.begin() + s + L);
    sample.frames.assign(seq.targets.begin() + s, seq.targets.begin() + s + L);
    sample.flows.assign(seq.flows.begin() + s, seq.flows.begin() + s + L - 1);
    out.push_back(std::move(sample));
  }
  return out;
}

FlowField compose_flows(std::span<const FlowField> flows, std::size_t a, std::size_t b) {
  if (a > b || b > flows.size()) throw UsageError("compose_flows: bad frame range");
  if (flows.empty()) throw UsageError("compose_flows: no flows");
  const int W = flows[0].width, H = flows[0].height;
  FlowField out(W, H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double px = x, py = y;
      for (std::size_t j = b; j > a; --j) {
        const FlowField& f = flows[j - 1];
        const double sx = std::clamp(px, 0.0, W - 1.0), sy = std::clamp(py, 0.0, H - 1.0);
        const int x0 = std::min(static_cast<int>(sx), W - 1), y0 = std::min(static_cast<int>(sy), H - 1);
        const int x1 = std::min(x0 + 1, W - 1), y1 = std::min(y0 + 1, H - 1);
        const double fx = sx - x0, fy = sy - y0;
        auto bil = [&](const std::vector<double>& v) {
          const double top = v[y0 * W + x0] * (1 - fx) + v[y0 * W + x1] * fx;
          const double bot = v[y1 * W + x0] * (1 - fx) + v[y1 * W + x1] * fx;
          return top * (1 - fy) + bot * fy;
        };
        const double ddx = bil(f.dx), ddy = bil(f.dy);
        px = sx + ddx;
        py = sy + ddy;
      }
      const std::size_t i = static_cast<std::size_t>(y) * W + x;
      out.dx[i] = px - x;
      out.dy[i] = py - y;
    }
  return out;
}

Augmentation identity_augmentation(int width, int height) {
  Augmentation a;
  a.out_width = width;
  a.out_height = height;
  return a;
}

Augmentation draw_augmentation(std::mt19937_64& rng, int width, int height, int crop, const TrainConfig& config) {
  crop = std::min({crop, width, height});
  std::uniform_real_distribution<double> angle(-config.rotation_deg, config.rotation_deg);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Augmentation a;
  a.angle_rad = config.rotation_deg > 0.0 ? angle(rng) * std::numbers::pi / 180.0 : 0.0;
  a.flip_h = unit(rng) < config.flip_h;
  a.flip_v = unit(rng) < config.flip_v;
  a.crop_x = std::uniform_int_distribution<int>(0, width - crop)(rng);
  a.crop_y = std::uniform_int_distribution<int>(0, height - crop)(rng);
  a.out_width = crop;
  a.out_height = crop;
  return a;
}

TrainSample apply_augmentation(const TrainSample& sample, const Augmentation& aug) {
  if (sample.frames.empty()) return sample;
  const int W = sample.frames[0].width, H = sample.frames[0].height;
  if (aug.out_width < 1 || aug.out_height < 1 || aug.crop_x < 0 || aug.crop_y < 0 ||
      aug.crop_x + aug.out_width > W || aug.crop_y + aug.out_height > H)
    throw UsageError("augmentation crop exceeds the sample size");
  if (is_identity(aug, W, H)) return sample;
  const Affine A(aug, W, H);
  const int ow = aug.out_width, oh = aug.out_height;
  std::vector<double> qx(static_cast<std::size_t>(ow) * oh), qy(qx.size());
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) A.source(x, y, qx[y * ow + x], qy[y * ow + x]);

  TrainSample out;
  for (const auto& t : sample.tensors) {
    auto r = events::EventTensor::zeros(t.bins, oh, ow);
    for (int b = 0; b < t.bins; ++b) {
      const double* src = &t.values[static_cast<std::size_t>(b) * W * H];
      for (std::size_t i = 0; i < qx.size(); ++i)
        r.values[static_cast<std::size_t>(b) * ow * oh + i] = sample_zero(src, W, H, qx[i], qy[i]);
    }
    out.tensors.push_back(std::move(r));
  }
  for (const auto& f : sample.frames) {
    Image r(ow, oh);
    for (std::size_t i = 0; i < qx.size(); ++i) r.data[i] = sample_zero(f.data.data(), W, H, qx[i], qy[i]);
    out.frames.push_back(std::move(r));
  }
  for (const auto& f : sample.flows) {
    Image dx(W, H), dy(W, H);
    dx.data = f.dx;
    dy.data = f.dy;
    FlowField r(ow, oh);
    for (std::size_t i = 0; i < qx.size(); ++i) {
      const double vx = dx.sample_clamped(qx[i], qy[i]), vy = dy.sample_clamped(qx[i], qy[i]);
      r.dx[i] = A.fwd[0][0] * vx + A.fwd[0][1] * vy;
      r.dy[i] = A.fwd[1][0] * vx + A.fwd[1][1] * vy;
    }
    out.flows.push_back(std::move(r));
  }
  return out;
}

TrainSample augment(const TrainSample& sample, std::mt19937_64& rng, int crop, const TrainConfig& config) {
  if (sample.frames.empty()) return sample;
  const auto aug = draw_augmentation(rng, sample.frames[0].width, sample.frames[0].height, crop, config);
  return apply_augmentation(sample, aug);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_dataset(std::size_t count, double ratio,
                                                                            std::uint64_t seed) {
  if (!(ratio > 0.0) || ratio > 1.0) throw UsageError("split ratio must be in (0, 1]");
  if (count < 2) throw UsageError("need at least 2 sequences to split, got " + std::to_string(count));
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(count)));
  n_train = std::clamp<std::size_t>(n_train, 1, count);
  if (ratio < 1.0 && n_train == count) n_train = count - 1;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> tr(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> va(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(tr.begin(), tr.end());
  std::sort(va.begin(), va.end());
  return {tr, va};
}

}  // namespace e2v::train
