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

#include <filesystem>
#include <random>

#include "e2v/sim/image.hpp"

namespace e2v::sim {

struct TextureOptions {
  int width = 128;
  int height = 128;
  int octaves = 4;      // value-noise octaves, coarsest cell = width / 4
  int shapes = 12;      // random rectangles and discs over the noise
  double shape_opacity = 1.0;
};

/// Procedural scene texture: multi-scale smooth value noise overlaid with
/// flat-shaded geometric shapes. Values lie in [0,1].
Image procedural_texture(std::mt19937_64& rng, const TextureOptions& options);

/// Low-frequency noise only (no hard edges); used for warp-accuracy checks.
Image smooth_texture(std::mt19937_64& rng, int width, int height);

/// Loads a PGM/PPM texture and resizes it (bilinear) to at least the given size.
Image load_texture(const std::filesystem::path& path, int min_width, int min_height);

}  // namespace e2v::sim
