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
#include <vector>

#include "e2v/events/cfa.hpp"
#include "e2v/pipeline/reconstructor.hpp"

namespace e2v::pipeline {

struct ColorFrame {
  double timestamp = 0.0;
  RgbImage image;
};

/// x2 Catmull-Rom (a = -0.5) bicubic upsampling with half-pixel alignment
/// and edge clamping.
Image upsample_bicubic2x(const Image& image);

/// sRGB (D65) <-> CIE L*a*b*. RGB components in [0,1].
std::array<double, 3> rgb_to_lab(const std::array<double, 3>& rgb);
std::array<double, 3> lab_to_rgb(const std::array<double, 3>& lab);

/// Chroma from full-resolution RGB planes with L* replaced by 100 * luminance,
/// converted back and clipped. All four planes share one size.
RgbImage fuse_luminance(const Image& red, const Image& green, const Image& blue, const Image& luminance);

/// Four quarter-resolution channel reconstructions plus a full-resolution
/// grayscale one from all events, fused per grayscale frame (channel frames
/// paired by nearest timestamp). Count policies are divided by 4 for the
/// channel streams.
std::vector<ColorFrame> color_reconstruct(const events::EventStream& stream, nn::ModelWeights<float>& weights,
                                          const nn::NetworkConfig& config, const events::CfaPattern& pattern,
                                          const WindowPolicy& policy, const PostprocessOptions& post = {});

}  // namespace e2v::pipeline
