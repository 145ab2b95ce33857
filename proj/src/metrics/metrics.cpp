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

#include "e2v/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "e2v/common.hpp"
#include "e2v/losses/losses.hpp"

namespace e2v::metrics {

double mse(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw UsageError("mse: shape mismatch");
  if (a.size() == 0) throw UsageError("mse: empty image");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    w[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

namespace {

// Valid-region separable filtering: output is (W-k+1) x (H-k+1).
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height, const std::vector<double>& w) {
  const int k = static_cast<int>(w.size());
  const int ow = width - k + 1, oh = height - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += w[i] * src[static_cast<std::size_t>(y) * width + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += w[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b, const SsimOptions& o) {
  if (!a.same_shape(b)) throw UsageError("ssim: shape mismatch");
  if (a.width < o.window || a.height < o.window) throw UsageError("ssim: image smaller than the window");
  const auto w = gaussian_window(o.window, o.sigma);
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a.data[i] * a.data[i];
    bb[i] = b.data[i] * b.data[i];
    ab[i] = a.data[i] * b.data[i];
  }
  const auto mu_a = filter_valid(a.data, a.width, a.height, w);
  const auto mu_b = filter_valid(b.data, a.width, a.height, w);
  const auto e_aa = filter_valid(aa, a.width, a.height, w);
  const auto e_bb = filter_valid(bb, a.width, a.height, w);
  const auto e_ab = filter_valid(ab, a.width, a.height, w);
  const double c1 = (o.k1 * o.dynamic_range) * (o.k1 * o.dynamic_range);
  const double c2 = (o.k2 * o.dynamic_range) * (o.k2 * o.dynamic_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma, vb = e_bb[i] - mb * mb, cov = e_ab[i] - ma * mb;
    total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

double temporal_error(std::span<const Image> frames, std::span<const FlowField> flows, std::span<const Image> gts,
                      double alpha) {
  if (frames.size() != gts.size()) throw UsageError("temporal_error: frame and ground-truth counts differ");
  if (frames.size() < 2) return 0.0;
  if (flows.size() != frames.size() - 1) throw UsageError("temporal_error: need one flow per consecutive pair");
  double total = 0.0;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const Image mask = losses::occlusion_mask(gts[k], gts[k - 1], flows[k - 1], alpha);
    total += losses::temporal_loss(frames[k], frames[k - 1], flows[k - 1], mask);
  }
  return total / static_cast<double>(frames.size() - 1);
}

SequenceMetrics EvalReport::mean() const {
  SequenceMetrics m;
  m.name = "mean";
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.mse += r.mse;
    m.ssim += r.ssim;
    m.temporal_error += r.temporal_error;
    m.pairs += r.pairs;
    m.skipped += r.skipped;
  }
  const double n = static_cast<double>(rows.size());
  m.mse /= n;
  m.ssim /= n;
  m.temporal_error /= n;
  return m;
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os << "sequence,mse,ssim,temporal_error,pairs,skipped\n";
  auto row = [&](const SequenceMetrics& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%d,%d\n", r.mse, r.ssim, r.temporal_error, r.pairs, r.skipped);
    os << r.name << buf;
  };
  for (const auto& r : rows) row(r);
  row(mean());
  return os.str();
}

std::string EvalReport::to_table() const {
  std::size_t name_w = 8;
  for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-*s %10s %10s %10s %6s %7s\n", static_cast<int>(name_w), "sequence", "MSE", "SSIM",
                "temporal", "pairs", "skipped");
  os << buf;
  auto row = [&](const SequenceMetrics& r) {
    std::snprintf(buf, sizeof buf, "%-*s %10.4f %10.4f %10.4f %6d %7d\n", static_cast<int>(name_w), r.name.c_str(),
                  r.mse, r.ssim, r.temporal_error, r.pairs, r.skipped);
    os << buf;
  };
  for (const auto& r : rows) row(r);
  row(mean());
  return os.str();
}

int match_nearest(std::span<const Frame> frames, double t, double tolerance) {
  auto it = std::lower_bound(frames.begin(), frames.end(), t,
                             [](const Frame& f, double v) { return f.timestamp < v; });
  int best = -1;
  double best_d = tolerance;
  auto consider = [&](auto pos) {
    if (pos < frames.begin() || pos >= frames.end()) return;
    const double d = std::abs(pos->timestamp - t);
    if (d <= best_d && (best < 0 || d < best_d)) {
      best = static_cast<int>(pos - frames.begin());
      best_d = d;
    }
  };
  if (it != frames.begin()) consider(it - 1);
  consider(it);
  return best;
}

SequenceMetrics evaluate_sequence(std::span<const Frame> reconstructed, std::span<const Image> gt_frames,
                                  std::span<const double> gt_times, std::span<const FlowField> gt_flows,
                                  const EvalOptions& options) {
  if (gt_frames.size() != gt_times.size()) throw UsageError("evaluate: frame/timestamp count mismatch");
  if (gt_frames.size() > 1 && gt_flows.size() + 1 != gt_frames.size())
    throw UsageError("evaluate: need one flow per consecutive ground-truth pair");
  if (!std::is_sorted(reconstructed.begin(), reconstructed.end(),
                      [](const Frame& a, const Frame& b) { return a.timestamp < b.timestamp; }))
    throw UsageError("evaluate: reconstructed frames are not time-ordered");

  const double t_first = gt_times.empty() ? 0.0 : gt_times.front();
  const double t_last = gt_times.empty() ? 0.0 : gt_times.back();
  auto prep = [&](const Image& im) { return options.hist_eq ? local_hist_eq(im, options.clahe) : im; };

  SequenceMetrics m;
  std::vector<Image> rec_eq(gt_frames.size()), gt_eq(gt_frames.size());
  std::vector<char> matched(gt_frames.size(), 0);
  for (std::size_t k = 0; k < gt_frames.size(); ++k) {
    const double t = gt_times[k];
    if (t < t_first + options.skip_head || t > t_last - options.skip_tail) continue;
    const int idx = match_nearest(reconstructed, t, options.tolerance);
    if (idx < 0) {
      ++m.skipped;
      continue;
    }
    if (!reconstructed[static_cast<std::size_t>(idx)].image.same_shape(gt_frames[k]))
      throw DataError("evaluate: reconstruction and ground truth differ in size");
    matched[k] = 1;
    rec_eq[k] = prep(reconstructed[static_cast<std::size_t>(idx)].image);
    gt_eq[k] = prep(gt_frames[k]);
    m.mse += mse(rec_eq[k], gt_eq[k]);
    m.ssim += ssim(rec_eq[k], gt_eq[k]);
    ++m.pairs;
  }
  if (m.pairs == 0) throw DataError("evaluate: no reconstructed frame within tolerance of any ground-truth frame");
  m.mse /= m.pairs;
  m.ssim /= m.pairs;

  int tc_pairs = 0;
  for (std::size_t k = 1; k < gt_frames.size(); ++k) {
    if (!matched[k] || !matched[k - 1]) continue;
    const Image mask = losses::occlusion_mask(gt_eq[k], gt_eq[k - 1], gt_flows[k - 1], options.alpha);
    m.temporal_error += losses::temporal_loss(rec_eq[k], rec_eq[k - 1], gt_flows[k - 1], mask);
    ++tc_pairs;
  }
  if (tc_pairs > 0) m.temporal_error /= tc_pairs;
  return m;
}

}  // namespace e2v::metrics
