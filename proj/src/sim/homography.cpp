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

#include "e2v/sim/homography.hpp"

#include <cmath>

#include "e2v/common.hpp"

namespace e2v::sim {

Homography Homography::translation(double tx, double ty) { return {{1, 0, tx, 0, 1, ty, 0, 0, 1}}; }

Homography Homography::from_params(double tx, double ty, double angle, double log_zoom, double shear, double cx,
                                   double cy) {
  const double s = std::exp(log_zoom);
  const double c = std::cos(angle) * s;
  const double n = std::sin(angle) * s;
  // rotation+zoom, then shear along x
  const Homography linear{{c, -n + shear, 0, n, c, 0, 0, 0, 1}};
  return translation(cx + tx, cy + ty) * linear * translation(-cx, -cy);
}

double Homography::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
}

bool Homography::invertible() const {
  const double d = det();
  return std::isfinite(d) && std::abs(d) > 1e-12;
}

Homography Homography::inverse() const {
  if (!invertible()) throw UsageError("homography is singular");
  const double d = det();
  Homography r;
  r.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
  r.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
  r.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
  r.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
  r.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
  r.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
  r.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
  r.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
  r.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
  return r;
}

Homography Homography::operator*(const Homography& rhs) const {
  Homography r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * rhs.m[k * 3 + j];
      r.m[i * 3 + j] = s;
    }
  return r;
}

std::array<double, 2> Homography::apply(double x, double y) const {
  const double w = m[6] * x + m[7] * y + m[8];
  return {(m[0] * x + m[1] * y + m[2]) / w, (m[3] * x + m[4] * y + m[5]) / w};
}

Trajectory Trajectory::random(std::mt19937_64& rng, double duration, int width, int height, double scale) {
  Trajectory tr;
  tr.duration_ = duration;
  tr.cx_ = (width - 1) / 2.0;
  tr.cy_ = (height - 1) / 2.0;
  // Amplitudes relative to sensor size: up to ~0.35 W of translation,
  // 0.35 rad of rotation, +-20% zoom and 0.1 shear over the sequence.
  const double amp[5] = {0.35 * width, 0.35 * height, 0.35, 0.2, 0.1};
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int p = 0; p < 5; ++p)
    for (int k = 0; k < 3; ++k) tr.coeffs_[p][k] = scale * amp[p] * unit(rng) / static_cast<double>(k + 1);
  return tr;
}

Trajectory Trajectory::constant_translation(double duration, int width, int height, double vx, double vy) {
  Trajectory tr;
  tr.duration_ = duration;
  tr.cx_ = (width - 1) / 2.0;
  tr.cy_ = (height - 1) / 2.0;
  tr.coeffs_[0][0] = vx * duration;
  tr.coeffs_[1][0] = vy * duration;
  return tr;
}

Homography Trajectory::at(double t) const {
  const double u = duration_ > 0.0 ? t / duration_ : 0.0;
  double v[5];
  for (int p = 0; p < 5; ++p) v[p] = u * (coeffs_[p][0] + u * (coeffs_[p][1] + u * coeffs_[p][2]));
  return Homography::from_params(v[0], v[1], v[2], v[3], v[4], cx_, cy_);
}

}  // namespace e2v::sim
