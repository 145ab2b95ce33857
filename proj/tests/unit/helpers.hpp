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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "e2v/events/event.hpp"

namespace e2v::testing {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("e2v_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Uniformly random valid stream with strictly increasing timestamps.
inline events::EventStream random_stream(std::mt19937_64& rng, std::size_t n, int width, int height,
                                         double duration = 1.0) {
  events::EventStream s;
  s.width = width;
  s.height = height;
  std::uniform_int_distribution<int> ux(0, width - 1), uy(0, height - 1), up(0, 1);
  std::uniform_real_distribution<double> gap(0.2, 1.8);
  double t = 0.0;
  const double mean_gap = duration / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    t += gap(rng) * mean_gap;
    s.events.push_back({t, static_cast<std::uint16_t>(ux(rng)), static_cast<std::uint16_t>(uy(rng)),
                        static_cast<std::int8_t>(up(rng) ? 1 : -1)});
  }
  return s;
}

}  // namespace e2v::testing
