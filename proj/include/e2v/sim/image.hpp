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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace e2v {

/// Single-channel image, row-major, values nominally in [0,1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }

  /// Bilinear sample at continuous coordinates (pixel centers at integers),
  /// clamping the sample position to the image.
  double sample_clamped(double x, double y) const;

  friend bool operator==(const Image&, const Image&) = default;
};

/// Dense per-pixel displacement (dx, dy) in pixels.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h), dx(static_cast<std::size_t>(w) * h, 0.0), dy(static_cast<std::size_t>(w) * h, 0.0) {}

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Three-channel image, channel-planar.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, 3> channels;

  RgbImage() = default;
  RgbImage(int w, int h);
};

// PGM (P5, 8-bit) / PPM (P6, 8-bit). Values are clipped to [0,1] and rounded.
void write_pgm(const Image& image, const std::filesystem::path& path);
Image read_pgm(const std::filesystem::path& path);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_ppm(const std::filesystem::path& path);

/// "FLW1": magic, u16 W, u16 H, then W*H little-endian f32 (dx, dy) pairs.
std::vector<std::uint8_t> encode_flow(const FlowField& flow);
FlowField decode_flow(std::span<const std::uint8_t> bytes);
void write_flow(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flow(const std::filesystem::path& path);

}  // namespace e2v
