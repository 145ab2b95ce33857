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

#pragma once

#include <array>
#include <random>

namespace e2v::sim {

/// Planar projective transform acting on pixel coordinates.
struct Homography {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major

  static Homography identity() { return {}; }
  static Homography translation(double tx, double ty);
  static Homography from_params(double tx, double ty, double angle, double log_zoom, double shear, double cx,
                                double cy);

  double det() const;
  bool invertible() const;
  /// Throws UsageError when singular.
  Homography inverse() const;
  Homography operator*(const Homography& rhs) const;
  std::array<double, 2> apply(double x, double y) const;
};

/// Smooth camera motion: translation, rotation, isotropic zoom and shear,
/// each a cubic in normalized time with zero value at t = 0, applied about
/// the sensor center.
class Trajectory {
 public:
  Trajectory() = default;
  /// `scale` multiplies every motion amplitude; 0 gives a static camera.
  static Trajectory random(std::mt19937_64& rng, double duration, int width, int height, double scale = 1.0);
  static Trajectory constant_translation(double duration, int width, int height, double vx, double vy);

  double duration() const { return duration_; }
  Homography at(double t) const;

 private:
  // coefficient rows: tx, ty, angle, log_zoom, shear; columns: u, u^2, u^3
  std::array<std::array<double, 3>, 5> coeffs_{};
  double duration_ = 1.0;
  double cx_ = 0.0;
  double cy_ = 0.0;
};

}  // namespace e2v::sim
