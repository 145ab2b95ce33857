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

#include "e2v/pipeline/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

#include "e2v/common.hpp"
#include "e2v/events/event_io.hpp"
#include "e2v/events/voxel_grid.hpp"
#include "e2v/pipeline/reconstructor.hpp"

namespace e2v::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

double BenchReport::ingest_rate() const {
  const double s = (parse_ms + voxelize_ms) / 1000.0;
  return s > 0.0 ? static_cast<double>(events) / s : 0.0;
}

std::string BenchReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "events per window: %zu (%d repeats)\n"
                "parse       %9.3f ms\n"
                "voxelize    %9.3f ms\n"
                "forward     %9.3f ms\n"
                "postprocess %9.3f ms\n"
                "total       %9.3f ms\n"
                "parse+voxelize throughput: %.3g events/s\n",
                events, repeats, parse_ms, voxelize_ms, forward_ms, postprocess_ms, total_ms(), ingest_rate());
  return buf;
}

BenchReport run_benchmark(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                          const BenchOptions& o) {
  if (o.events == 0 || o.repeats < 1 || o.width < 1 || o.height < 1) throw UsageError("bench: bad options");
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> ux(0, o.width - 1), uy(0, o.height - 1), up(0, 1);
  events::EventStream stream{o.width, o.height, {}};
  stream.events.reserve(o.events);
  for (std::size_t i = 0; i < o.events; ++i)
    stream.events.push_back({1e-6 * static_cast<double>(i), static_cast<std::uint16_t>(ux(rng)),
                             static_cast<std::uint16_t>(uy(rng)), static_cast<std::int8_t>(up(rng) ? 1 : -1)});
  const std::string text = events::format_event_text(stream);

  Reconstructor recon(weights, config, WindowPolicy::by_count(o.events));
  BenchReport r;
  r.events = o.events;
  r.repeats = o.repeats;
  for (int k = 0; k < o.repeats; ++k) {
    auto t0 = Clock::now();
    const events::EventStream parsed = events::parse_event_text(text);
    r.parse_ms += ms_since(t0);

    t0 = Clock::now();
    const events::EventWindow w{parsed.events, parsed.events.front().t, parsed.events.back().t};
    events::EventTensor tensor = events::encode_voxel_grid(w, config.input_bins, o.height, o.width);
    events::normalize_tensor(tensor);
    r.voxelize_ms += ms_since(t0);

    t0 = Clock::now();
    const Image raw = recon.step(tensor);
    r.forward_ms += ms_since(t0);

    t0 = Clock::now();
    const Image out = postprocess(raw);
    r.postprocess_ms += ms_since(t0);
    (void)out;
  }
  r.parse_ms /= o.repeats;
  r.voxelize_ms /= o.repeats;
  r.forward_ms /= o.repeats;
  r.postprocess_ms /= o.repeats;
  return r;
}

}  // namespace e2v::pipeline
