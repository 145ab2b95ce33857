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

#include "e2v/pipeline/hfr.hpp"

#include <algorithm>

#include "e2v/common.hpp"
#include "e2v/parallel.hpp"

namespace e2v::pipeline {

std::vector<Frame> hfr_synthesize(const events::EventStream& stream, nn::ModelWeights<float>& weights,
                                  const nn::NetworkConfig& config, std::size_t n, std::size_t d,
                                  const PostprocessOptions& post) {
  if (n == 0 || d == 0) throw UsageError("hfr: N and D must be >= 1");
  if (d > n) throw UsageError("hfr: shift D must not exceed window size N");
  if (n % d != 0) throw UsageError("hfr: shift D must divide window size N");
  const std::size_t offsets = n / d;

  std::vector<std::vector<Frame>> per_offset(offsets);
  parallel_for(offsets, [&](std::size_t j) {
    events::EventStream shifted{stream.width, stream.height, {}};
    const std::size_t skip = std::min(j * d, stream.events.size());
    shifted.events.assign(stream.events.begin() + static_cast<std::ptrdiff_t>(skip), stream.events.end());
    Reconstructor r(weights, config, WindowPolicy::by_count(n), post);
    per_offset[j] = reconstruct_stream(shifted, r);
  });

  struct Tagged {
    double t;
    std::size_t offset;
    std::size_t index;
  };
  std::vector<Tagged> order;
  for (std::size_t j = 0; j < offsets; ++j)
    for (std::size_t i = 0; i < per_offset[j].size(); ++i) order.push_back({per_offset[j][i].timestamp, j, i});
  std::stable_sort(order.begin(), order.end(), [](const Tagged& a, const Tagged& b) {
    return a.t < b.t || (a.t == b.t && a.offset < b.offset);
  });
  std::vector<Frame> merged;
  merged.reserve(order.size());
  for (const auto& o : order) merged.push_back(std::move(per_offset[o.offset][o.index]));
  return merged;
}

std::vector<Frame> deflicker(const std::vector<Frame>& frames, double strength) {
  if (!(strength >= 0.0 && strength < 1.0)) throw UsageError("deflicker strength must be in [0, 1)");
  std::vector<Frame> out = frames;
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!out[k].image.same_shape(out[k - 1].image)) throw UsageError("deflicker: frame sizes differ");
    for (std::size_t i = 0; i < out[k].image.size(); ++i)
      out[k].image.data[i] = (1.0 - strength) * frames[k].image.data[i] + strength * out[k - 1].image.data[i];
  }
  return out;
}

}  // namespace e2v::pipeline
