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

#include "e2v/sim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "e2v/common.hpp"
#include "e2v/events/event_io.hpp"

namespace e2v::sim {
namespace fs = std::filesystem;

namespace {

std::string index_name(std::size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu%s", i, ext);
  return buf;
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

double get_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw DataError("meta.txt: missing key " + key);
  return std::stod(it->second);
}

}  // namespace

void write_sequence(const SimSequence& seq, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "frames", ec);
  fs::create_directories(dir / "flows", ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  events::save_events(seq.events, dir / "events.evb");
  for (std::size_t k = 0; k < seq.frames.size(); ++k) write_pgm(seq.frames[k], dir / "frames" / index_name(k, ".pgm"));
  for (std::size_t k = 0; k < seq.flows.size(); ++k) write_flow(seq.flows[k], dir / "flows" / index_name(k, ".flw"));

  std::ofstream ts(dir / "timestamps.txt");
  char buf[64];
  for (std::size_t k = 0; k < seq.frame_times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu %.9f\n", k, seq.frame_times[k]);
    ts << buf;
  }
  std::ofstream meta(dir / "meta.txt");
  auto line = [&](const char* key, const char* fmt, auto value) {
    std::snprintf(buf, sizeof(buf), fmt, value);
    meta << key << "=" << buf << "\n";
  };
  line("c_pos", "%.6f", seq.thresholds.c_pos);
  line("c_neg", "%.6f", seq.thresholds.c_neg);
  line("seed", "%llu", static_cast<unsigned long long>(seq.config.seed));
  line("width", "%d", seq.config.width);
  line("height", "%d", seq.config.height);
  line("duration", "%.9g", seq.config.duration);
  line("f_gt", "%.9g", seq.config.f_gt);
  line("f_sim", "%.9g", seq.config.f_sim);
  line("motion_scale", "%.9g", seq.config.motion_scale);
  line("num_events", "%zu", seq.events.events.size());
  line("num_frames", "%zu", seq.frames.size());
  if (!ts || !meta) throw DataError("failed writing metadata in " + dir.string());
}

SimSequence read_sequence(const fs::path& dir) {
  SimSequence seq;
  const auto kv = read_key_values(dir / "meta.txt");
  seq.thresholds.c_pos = get_double(kv, "c_pos");
  seq.thresholds.c_neg = get_double(kv, "c_neg");
  seq.config.seed = std::stoull(kv.at("seed"));
  seq.config.width = static_cast<int>(get_double(kv, "width"));
  seq.config.height = static_cast<int>(get_double(kv, "height"));
  seq.config.duration = get_double(kv, "duration");
  seq.config.f_gt = get_double(kv, "f_gt");
  seq.config.f_sim = get_double(kv, "f_sim");
  if (kv.count("motion_scale")) seq.config.motion_scale = get_double(kv, "motion_scale");
  seq.events = events::load_events(dir / "events.evb");

  std::ifstream ts(dir / "timestamps.txt");
  if (!ts) throw DataError("cannot open " + (dir / "timestamps.txt").string());
  std::size_t idx = 0;
  double t = 0.0;
  while (ts >> idx >> t) {
    if (idx != seq.frame_times.size()) throw DataError("timestamps.txt: indices must be consecutive");
    seq.frame_times.push_back(t);
  }
  for (std::size_t k = 0; k < seq.frame_times.size(); ++k)
    seq.frames.push_back(read_pgm(dir / "frames" / index_name(k, ".pgm")));
  for (std::size_t k = 0; k + 1 < seq.frame_times.size(); ++k)
    seq.flows.push_back(read_flow(dir / "flows" / index_name(k, ".flw")));
  return seq;
}

void write_dataset(std::span<const SimSequence> sequences, const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw DataError("cannot create " + root.string() + ": " + ec.message());
  for (std::size_t i = 0; i < sequences.size(); ++i)
    write_sequence(sequences[i], root / ("seq_" + index_name(i, "")));
}

std::vector<SimSequence> read_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("dataset directory not found: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && entry.path().filename().string().rfind("seq_", 0) == 0) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<SimSequence> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) out.push_back(read_sequence(d));
  return out;
}

SimSequence quantized_like_disk(const SimSequence& seq) {
  SimSequence q = seq;
  q.config.texture.reset();
  for (Image& f : q.frames)
    for (double& v : f.data) v = std::lround(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  for (FlowField& fl : q.flows) {
    for (double& v : fl.dx) v = static_cast<float>(v);
    for (double& v : fl.dy) v = static_cast<float>(v);
  }
  for (double& t : q.frame_times) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", t);
    t = std::stod(buf);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", q.thresholds.c_pos);
  q.thresholds.c_pos = std::stod(buf);
  std::snprintf(buf, sizeof(buf), "%.6f", q.thresholds.c_neg);
  q.thresholds.c_neg = std::stod(buf);
  return q;
}

}  // namespace e2v::sim
