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

#include "e2v/train/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "e2v/common.hpp"

namespace e2v::train {

void TrainConfig::validate() const {
  if (epochs < 0) throw UsageError("epochs must be >= 0");
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (unroll < 1) throw UsageError("unroll must be >= 1");
  if (!(lr > 0.0)) throw UsageError("lr must be > 0");
  if (crop < 1) throw UsageError("crop must be >= 1");
  if (rotation_deg < 0.0 || rotation_deg > 180.0) throw UsageError("rotation_deg must be in [0, 180]");
  if (flip_h < 0.0 || flip_h > 1.0 || flip_v < 0.0 || flip_v > 1.0) throw UsageError("flip probabilities must be in [0, 1]");
  if (window_events < 1) throw UsageError("window_events must be >= 1");
  if (!(val_ratio > 0.0) || val_ratio > 1.0) throw UsageError("val_ratio must be in (0, 1]");
  loss.validate();
  if (loss.l0 > unroll) throw UsageError("l0 must not exceed unroll");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw UsageError("config key '" + key + "': cannot parse '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto i = [&] { return parse_number<int>(key, value); };
  auto d = [&] { return parse_number<double>(key, value); };
  nn::NetworkConfig& n = c.network;
  TrainConfig& t = c.train;
  if (key == "num_encoders") n.num_encoders = i();
  else if (key == "num_residual") n.num_residual = i();
  else if (key == "base_channels") n.base_channels = i();
  else if (key == "skip_mode") n.skip = nn::parse_skip_mode(value);
  else if (key == "input_bins") n.input_bins = i();
  else if (key == "recurrent") n.recurrent = parse_bool(key, value);
  else if (key == "epochs") t.epochs = i();
  else if (key == "batch_size") t.batch_size = i();
  else if (key == "unroll") t.unroll = n.unroll = i();
  else if (key == "lr") t.lr = d();
  else if (key == "crop") t.crop = i();
  else if (key == "rotation_deg") t.rotation_deg = d();
  else if (key == "flip_h") t.flip_h = d();
  else if (key == "flip_v") t.flip_v = d();
  else if (key == "augment") t.augment = parse_bool(key, value);
  else if (key == "lambda_tc") t.loss.lambda_tc = d();
  else if (key == "alpha") t.loss.alpha = d();
  else if (key == "l0") t.loss.l0 = i();
  else if (key == "loss") {
    if (value == "l1") t.loss.kind = losses::ReconstructionKind::L1;
    else if (value == "mse") t.loss.kind = losses::ReconstructionKind::MSE;
    else throw UsageError("config key 'loss': expected l1 or mse, got '" + value + "'");
  } else if (key == "window_mode") {
    if (value == "frames") t.window_mode = WindowMode::Frames;
    else if (value == "count") t.window_mode = WindowMode::Count;
    else throw UsageError("config key 'window_mode': expected frames or count, got '" + value + "'");
  } else if (key == "window_events") t.window_events = i();
  else if (key == "val_ratio") t.val_ratio = d();
  else if (key == "seed") t.seed = parse_number<std::uint64_t>(key, value);
  else throw UsageError("unknown config key '" + key + "'");
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.network.validate();
  base.train.validate();
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

std::map<std::string, std::string> describe(const RunConfig& c) {
  const nn::NetworkConfig& n = c.network;
  const TrainConfig& t = c.train;
  return {
      {"num_encoders", std::to_string(n.num_encoders)},
      {"num_residual", std::to_string(n.num_residual)},
      {"base_channels", std::to_string(n.base_channels)},
      {"skip_mode", nn::to_string(n.skip)},
      {"input_bins", std::to_string(n.input_bins)},
      {"recurrent", n.recurrent ? "true" : "false"},
      {"epochs", std::to_string(t.epochs)},
      {"batch_size", std::to_string(t.batch_size)},
      {"unroll", std::to_string(t.unroll)},
      {"lr", fmt(t.lr)},
      {"crop", std::to_string(t.crop)},
      {"rotation_deg", fmt(t.rotation_deg)},
      {"flip_h", fmt(t.flip_h)},
      {"flip_v", fmt(t.flip_v)},
      {"augment", t.augment ? "true" : "false"},
      {"lambda_tc", fmt(t.loss.lambda_tc)},
      {"alpha", fmt(t.loss.alpha)},
      {"l0", std::to_string(t.loss.l0)},
      {"loss", t.loss.kind == losses::ReconstructionKind::L1 ? "l1" : "mse"},
      {"window_mode", t.window_mode == WindowMode::Frames ? "frames" : "count"},
      {"window_events", std::to_string(t.window_events)},
      {"val_ratio", fmt(t.val_ratio)},
      {"seed", std::to_string(t.seed)},
  };
}

std::string format_settings(const std::map<std::string, std::string>& settings) {
  std::string out;
  for (const auto& [k, v] : settings) out += k + "=" + v + "\n";
  return out;
}

}  // namespace e2v::train
