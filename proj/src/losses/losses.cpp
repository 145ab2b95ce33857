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

#include "e2v/losses/losses.hpp"

#include <algorithm>
#include <cmath>

#include "e2v/common.hpp"
#include "e2v/nn/ops.hpp"

namespace e2v::losses {

void LossConfig::validate() const {
  if (!(lambda_tc >= 0.0)) throw UsageError("lambda_tc must be >= 0");
  if (!(alpha > 0.0)) throw UsageError("alpha must be > 0");
  if (l0 < 0) throw UsageError("L0 must be >= 0");
}

namespace {

struct Tap {
  int x0, y0, x1, y1;
  double fx, fy;
};

Tap warp_tap(int width, int height, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height - 1));
  Tap t;
  t.x0 = std::min(static_cast<int>(x), width - 1);
  t.y0 = std::min(static_cast<int>(y), height - 1);
  t.x1 = std::min(t.x0 + 1, width - 1);
  t.y1 = std::min(t.y0 + 1, height - 1);
  t.fx = x - t.x0;
  t.fy = y - t.y0;
  return t;
}

void require_flow(int width, int height, const FlowField& flow) {
  if (flow.width != width || flow.height != height) throw UsageError("flow shape does not match image");
}

}  // namespace

Image backward_warp(const Image& image, const FlowField& flow) {
  require_flow(image.width, image.height, flow);
  Image out(image.width, image.height);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * image.width + x;
      out.data[i] = image.sample_clamped(x + flow.dx[i], y + flow.dy[i]);
    }
  return out;
}

Image occlusion_mask(const Image& gt_k, const Image& gt_km1, const FlowField& flow, double alpha) {
  if (!gt_k.same_shape(gt_km1)) throw UsageError("occlusion_mask: frame shapes differ");
  const Image warped = backward_warp(gt_km1, flow);
  Image mask(gt_k.width, gt_k.height);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double d = gt_k.data[i] - warped.data[i];
    mask.data[i] = std::exp(-alpha * d * d);
  }
  return mask;
}

double temporal_loss(const Image& current, const Image& previous, const FlowField& flow, const Image& mask) {
  if (!current.same_shape(previous) || !current.same_shape(mask)) throw UsageError("temporal_loss: shape mismatch");
  const Image warped = backward_warp(previous, flow);
  double s = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) s += mask.data[i] * std::abs(current.data[i] - warped.data[i]);
  return s / static_cast<double>(current.size());
}

double reconstruction_loss(const Image& prediction, const Image& target, ReconstructionKind kind) {
  if (!prediction.same_shape(target)) throw UsageError("reconstruction_loss: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = prediction.data[i] - target.data[i];
    s += kind == ReconstructionKind::L1 ? std::abs(d) : d * d;
  }
  return s / static_cast<double>(target.size());
}

double total_loss(std::span<const double> reconstruction, std::span<const double> temporal, const LossConfig& config) {
  double rec = 0.0, tc = 0.0;
  for (double v : reconstruction) rec += v;
  for (std::size_t k = static_cast<std::size_t>(std::max(config.l0, 0)); k < temporal.size(); ++k) tc += temporal[k];
  return rec + config.lambda_tc * tc;
}

template <typename T>
nn::Var backward_warp(nn::Graph<T>& g, nn::Var image, std::span<const FlowField> flows) {
  const nn::Shape s = g.shape(image);
  if (s.c != 1) throw UsageError("backward_warp: expected single-channel images");
  if (flows.size() != 1 && flows.size() != static_cast<std::size_t>(s.n))
    throw UsageError("backward_warp: need one flow or one per batch item");
  std::vector<Tap> taps;
  taps.reserve(static_cast<std::size_t>(s.n) * s.plane());
  for (int n = 0; n < s.n; ++n) {
    const FlowField& f = flows[flows.size() == 1 ? 0 : static_cast<std::size_t>(n)];
    require_flow(s.w, s.h, f);
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * s.w + x;
        taps.push_back(warp_tap(s.w, s.h, x + f.dx[i], y + f.dy[i]));
      }
  }
  nn::Tensor<T> out(s);
  {
    const nn::Tensor<T>& iv = g.value(image);
    for (int n = 0; n < s.n; ++n) {
      const T* src = iv.channel(n, 0);
      T* dst = out.channel(n, 0);
      for (std::size_t i = 0; i < s.plane(); ++i) {
        const Tap& t = taps[n * s.plane() + i];
        const double top = src[t.y0 * s.w + t.x0] * (1.0 - t.fx) + src[t.y0 * s.w + t.x1] * t.fx;
        const double bottom = src[t.y1 * s.w + t.x0] * (1.0 - t.fx) + src[t.y1 * s.w + t.x1] * t.fx;
        dst[i] = static_cast<T>(top * (1.0 - t.fy) + bottom * t.fy);
      }
    }
  }
  return g.record(std::move(out), {image}, [image, taps = std::move(taps)](nn::Graph<T>& gr, nn::Var self) {
    if (!gr.requires_grad(image)) return;
    const nn::Tensor<T>& gy = gr.grad_buffer(self);
    nn::Tensor<T>& gx = gr.grad_buffer(image);
    const nn::Shape sh = gx.shape;
    for (int n = 0; n < sh.n; ++n) {
      const T* d = gy.channel(n, 0);
      T* o = gx.channel(n, 0);
      for (std::size_t i = 0; i < sh.plane(); ++i) {
        const Tap& t = taps[n * sh.plane() + i];
        const double v = d[i];
        o[t.y0 * sh.w + t.x0] += static_cast<T>(v * (1.0 - t.fx) * (1.0 - t.fy));
        o[t.y0 * sh.w + t.x1] += static_cast<T>(v * t.fx * (1.0 - t.fy));
        o[t.y1 * sh.w + t.x0] += static_cast<T>(v * (1.0 - t.fx) * t.fy);
        o[t.y1 * sh.w + t.x1] += static_cast<T>(v * t.fx * t.fy);
      }
    }
  });
}

template <typename T>
nn::Var temporal_loss(nn::Graph<T>& g, nn::Var current, nn::Var previous, std::span<const FlowField> flows,
                      const nn::Tensor<T>& mask) {
  const nn::Var warped = backward_warp(g, previous, flows);
  return nn::mean_abs_diff(g, current, warped, &mask);
}

template <typename T>
nn::Var reconstruction_loss(nn::Graph<T>& g, nn::Var prediction, nn::Var target, ReconstructionKind kind) {
  return kind == ReconstructionKind::L1 ? nn::mean_abs_diff<T>(g, prediction, target)
                                        : nn::mean_sq_diff<T>(g, prediction, target);
}

template nn::Var backward_warp<float>(nn::Graph<float>&, nn::Var, std::span<const FlowField>);
template nn::Var backward_warp<double>(nn::Graph<double>&, nn::Var, std::span<const FlowField>);
template nn::Var temporal_loss<float>(nn::Graph<float>&, nn::Var, nn::Var, std::span<const FlowField>,
                                      const nn::Tensor<float>&);
template nn::Var temporal_loss<double>(nn::Graph<double>&, nn::Var, nn::Var, std::span<const FlowField>,
                                       const nn::Tensor<double>&);
template nn::Var reconstruction_loss<float>(nn::Graph<float>&, nn::Var, nn::Var, ReconstructionKind);
template nn::Var reconstruction_loss<double>(nn::Graph<double>&, nn::Var, nn::Var, ReconstructionKind);

}  // namespace e2v::losses
