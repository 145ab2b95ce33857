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

// e2v command-line tool: simulate, train, reconstruct, eval, sweep, bench,
// gradcheck. Exit codes: 0 success, 1 usage, 2 data, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "e2v/common.hpp"
#include "e2v/events/cfa.hpp"
#include "e2v/events/event_io.hpp"
#include "e2v/events/windowing.hpp"
#include "e2v/metrics/metrics.hpp"
#include "e2v/nn/checkpoint.hpp"
#include "e2v/parallel.hpp"
#include "e2v/pipeline/bench.hpp"
#include "e2v/pipeline/color.hpp"
#include "e2v/pipeline/diagnostics.hpp"
#include "e2v/pipeline/hfr.hpp"
#include "e2v/pipeline/reconstructor.hpp"
#include "e2v/sim/dataset.hpp"
#include "e2v/sim/texture.hpp"
#include "e2v/simd/kernels.hpp"
#include "e2v/train/config.hpp"
#include "e2v/train/gradcheck_suite.hpp"
#include "e2v/train/sweep.hpp"
#include "e2v/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace e2v;

namespace {

int g_verbosity = 1;

void info(const std::string& msg) {
  if (g_verbosity > 0) std::cerr << msg << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Resolved options of the subcommand plus any extra settings.
void write_manifest(const fs::path& dir, const CLI::App& sub, const std::map<std::string, std::string>& extra = {}) {
  std::string text = "command=" + sub.get_name() + "\n";
  text += "simd=" + std::string(simd::isa_name(simd::active().isa)) + "\n";
  text += "threads=" + std::to_string(thread_count()) + "\n";
  text += sub.config_to_str(true, false);
  if (!extra.empty()) text += "# resolved configuration\n" + train::format_settings(extra);
  write_text(dir / "manifest.txt", text);
}

std::string frame_name(std::size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu.%s", i, ext);
  return buf;
}

std::string timestamps_text(const std::vector<double>& times) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.9f\n", i, times[i]);
    out += buf;
  }
  return out;
}

std::vector<Frame> read_frames_dir(const fs::path& dir) {
  std::istringstream in(read_text(dir / "timestamps.txt"));
  std::vector<Frame> frames;
  std::size_t index = 0;
  double t = 0.0;
  while (in >> index >> t) frames.push_back({t, read_pgm(dir / frame_name(index, "pgm"))});
  if (frames.empty()) throw DataError("no frames listed in " + (dir / "timestamps.txt").string());
  return frames;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string out;
  int count = 4;
  double duration = 0.5;
  int size = 64;
  int width = 0;
  int height = 0;
  double f_gt = 50.0;
  double f_sim = 1000.0;
  std::uint64_t seed = 0;
  double motion_scale = 1.0;
  std::string texture;
};

void cmd_simulate(const SimulateArgs& a, const CLI::App& sub) {
  if (a.count < 1) throw UsageError("--count must be >= 1");
  const int w = a.width > 0 ? a.width : a.size;
  const int h = a.height > 0 ? a.height : a.size;
  if (w < 1 || h < 1) throw UsageError("sensor size must be positive");
  std::optional<Image> texture;
  if (!a.texture.empty()) texture = sim::load_texture(a.texture, 2 * w, 2 * h);
  fs::create_directories(a.out);
  std::vector<sim::SimSequence> seqs;
  for (int i = 0; i < a.count; ++i) {
    sim::SimConfig c;
    c.width = w;
    c.height = h;
    c.duration = a.duration;
    c.f_gt = a.f_gt;
    c.f_sim = a.f_sim;
    c.seed = a.seed + static_cast<std::uint64_t>(i);
    c.motion_scale = a.motion_scale;
    c.texture = texture;
    seqs.push_back(sim::simulate_sequence(c));
    info("sequence " + std::to_string(i) + ": " + std::to_string(seqs.back().events.events.size()) + " events, " +
         std::to_string(seqs.back().frames.size()) + " frames");
  }
  sim::write_dataset(seqs, a.out);
  write_manifest(a.out, sub);
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out;
  std::string config;
  std::vector<std::string> set;
  std::string resume;
  long max_steps = 0;
  // Shortcuts for common keys; applied after --config and --set.
  std::map<std::string, std::string> shortcuts;
};

train::RunConfig resolve_run_config(const std::string& file, const std::vector<std::string>& set,
                                    const std::map<std::string, std::string>& shortcuts) {
  train::RunConfig rc;
  if (!file.empty()) rc = train::load_run_config(file, rc);
  for (const auto& kv : set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    train::apply_setting(rc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : shortcuts) train::apply_setting(rc, k, v);
  rc.network.validate();
  rc.train.validate();
  return rc;
}

struct PreparedData {
  std::vector<train::TrainSample> samples;
  std::vector<train::WindowedSequence> validation;
};

PreparedData prepare_data(const std::string& root, const train::RunConfig& rc) {
  const auto seqs = sim::read_dataset(root);
  if (seqs.empty()) throw DataError("no sequences found under " + root);
  std::vector<std::size_t> tr, va;
  if (seqs.size() >= 2 && rc.train.val_ratio < 1.0) {
    std::tie(tr, va) = train::split_dataset(seqs.size(), rc.train.val_ratio, rc.train.seed);
  } else {
    for (std::size_t i = 0; i < seqs.size(); ++i) tr.push_back(i);
  }
  PreparedData d;
  for (std::size_t i : tr) {
    const auto w = train::window_sequence(seqs[i], rc.network.input_bins, rc.train.window_mode,
                                          rc.train.window_events);
    for (auto& s : train::make_samples(w, rc.train.unroll)) d.samples.push_back(std::move(s));
  }
  for (std::size_t i : va)
    d.validation.push_back(
        train::window_sequence(seqs[i], rc.network.input_bins, rc.train.window_mode, rc.train.window_events));
  if (d.samples.empty())
    throw DataError("no training samples: sequences are shorter than the unroll length " +
                    std::to_string(rc.train.unroll));
  info(std::to_string(tr.size()) + " training sequences (" + std::to_string(d.samples.size()) + " samples), " +
       std::to_string(va.size()) + " validation sequences");
  return d;
}

void cmd_train(const TrainArgs& a, const CLI::App& sub) {
  const train::RunConfig rc = resolve_run_config(a.config, a.set, a.shortcuts);
  fs::create_directories(a.out);
  write_manifest(a.out, sub, train::describe(rc));
  const PreparedData data = prepare_data(a.data, rc);

  nn::ModelWeights<float> weights;
  train::TrainState state;
  if (!a.resume.empty()) {
    nn::Checkpoint ck = nn::load_checkpoint(events::read_file_bytes(a.resume), rc.network);
    weights = std::move(ck.weights);
    if (ck.optimizer) state.optimizer = std::move(*ck.optimizer);
    if (auto it = ck.metadata.find("epochs_done"); it != ck.metadata.end()) state.epochs_done = std::stoi(it->second);
    info("resumed from " + a.resume + " after epoch " + std::to_string(state.epochs_done));
  } else {
    weights = nn::init_weights<float>(rc.network, rc.train.seed);
  }

  const fs::path ckpt_path = fs::path(a.out) / "checkpoint.e2v";
  const fs::path curves_path = fs::path(a.out) / "curves.csv";
  std::vector<train::EpochLog> logs;
  auto flush_curves = [&] {
    std::string csv = train::curves_csv(logs);
    if (!a.resume.empty() && fs::exists(curves_path)) {
      std::string prev = read_text(curves_path);
      csv = prev + csv.substr(csv.find('\n') + 1);
    }
    write_text(curves_path, csv);
  };

  train::TrainCallbacks cb;
  cb.max_steps = a.max_steps;
  cb.on_epoch = [&](const train::EpochLog& log, const nn::ModelWeights<float>& w, const train::TrainState& s) {
    logs.push_back(log);
    nn::Checkpoint ck{rc.network, w, s.optimizer, train::describe(rc)};
    ck.metadata["epochs_done"] = std::to_string(s.epochs_done);
    nn::save_checkpoint_file(ck, ckpt_path);
    char buf[200];
    std::snprintf(buf, sizeof buf, "epoch %d steps %ld loss %.5f rec %.5f tc %.5f | val rec %.5f tc %.5f ssim %.4f",
                  log.epoch, log.steps, log.train_loss, log.train_rec, log.train_tc, log.val_rec, log.val_temporal,
                  log.val_ssim);
    info(buf);
  };
  try {
    train::train(weights, rc.network, rc.train, data.samples, data.validation, state, cb);
  } catch (const NumericError&) {
    flush_curves();
    std::cerr << "training diverged; last good checkpoint: " << ckpt_path.string() << '\n';
    throw;
  }
  if (logs.empty()) {
    nn::Checkpoint ck{rc.network, weights, state.optimizer, train::describe(rc)};
    ck.metadata["epochs_done"] = std::to_string(state.epochs_done);
    nn::save_checkpoint_file(ck, ckpt_path);
  }
  flush_curves();
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string checkpoint;
  std::string events;
  std::string out;
  std::size_t window_count = 0;
  double window_duration_ms = 0.0;
  std::size_t hfr_shift = 0;
  double deflicker = 0.0;
  bool color = false;
  std::string cfa = "RGGB";
  bool no_postprocess = false;
  bool skip_empty = false;
  int decay_steps = 0;
};

void cmd_reconstruct(const ReconstructArgs& a, const CLI::App& sub) {
  if (a.window_count > 0 && a.window_duration_ms > 0.0)
    throw UsageError("--window-count and --window-duration-ms are mutually exclusive");
  pipeline::WindowPolicy policy = a.window_duration_ms > 0.0
                                      ? pipeline::WindowPolicy::by_duration(a.window_duration_ms / 1000.0)
                                      : pipeline::WindowPolicy::by_count(a.window_count > 0 ? a.window_count : 10000);
  policy.feed_empty = !a.skip_empty;
  if (a.hfr_shift > 0 && policy.kind != pipeline::WindowPolicy::Kind::Count)
    throw UsageError("--hfr-shift requires count windows");
  if (a.hfr_shift > 0 && a.color) throw UsageError("--hfr-shift and --color cannot be combined");
  pipeline::PostprocessOptions post;
  post.enabled = !a.no_postprocess;

  nn::Checkpoint ck = nn::load_checkpoint_file(a.checkpoint);
  const events::EventStream stream = events::load_events(a.events);
  fs::create_directories(a.out);
  write_manifest(a.out, sub);
  if (policy.kind == pipeline::WindowPolicy::Kind::Count && stream.events.size() % policy.count != 0)
    info("dropping " + std::to_string(events::dropped_by_count(stream, policy.count)) +
         " trailing events");

  std::vector<double> times;
  if (a.color) {
    const auto frames =
        pipeline::color_reconstruct(stream, ck.weights, ck.config, events::CfaPattern::parse(a.cfa), policy, post);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      write_ppm(frames[i].image, fs::path(a.out) / frame_name(i, "ppm"));
      times.push_back(frames[i].timestamp);
    }
  } else {
    std::vector<Frame> frames;
    if (a.hfr_shift > 0) {
      frames = pipeline::hfr_synthesize(stream, ck.weights, ck.config, policy.count, a.hfr_shift, post);
    } else {
      pipeline::Reconstructor r(ck.weights, ck.config, policy, post);
      frames = pipeline::reconstruct_stream(stream, r);
    }
    if (a.deflicker > 0.0) frames = pipeline::deflicker(frames, a.deflicker);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      write_pgm(frames[i].image, fs::path(a.out) / frame_name(i, "pgm"));
      times.push_back(frames[i].timestamp);
    }
  }
  write_text(fs::path(a.out) / "timestamps.txt", timestamps_text(times));
  info("wrote " + std::to_string(times.size()) + " frames to " + a.out);

  if (a.decay_steps > 0) {
    const auto report = pipeline::decay_diagnostic(ck.weights, ck.config, stream, policy, a.decay_steps);
    std::string csv = "step,mean_abs_change\n";
    char buf[64];
    for (std::size_t k = 0; k < report.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%.6f\n", k + 1, report[k]);
      csv += buf;
    }
    write_text(fs::path(a.out) / "decay.csv", csv);
  }
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string frames;
  std::string gt;
  std::string out;
  double tolerance_ms = 1.0;
  double skip_head_s = 0.0;
  double skip_tail_s = 0.0;
  bool no_hist_eq = false;
  double alpha = 50.0;
};

void cmd_eval(const EvalArgs& a, const CLI::App&) {
  metrics::EvalOptions opt;
  opt.tolerance = a.tolerance_ms / 1000.0;
  opt.skip_head = a.skip_head_s;
  opt.skip_tail = a.skip_tail_s;
  opt.hist_eq = !a.no_hist_eq;
  opt.alpha = a.alpha;

  std::vector<std::pair<fs::path, fs::path>> pairs;  // (frames, gt sequence)
  if (fs::exists(fs::path(a.gt) / "meta.txt")) {
    pairs.emplace_back(a.frames, a.gt);
  } else {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(a.gt))
      if (e.is_directory() && e.path().filename().string().rfind("seq_", 0) == 0) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) pairs.emplace_back(fs::path(a.frames) / d.filename(), d);
  }
  if (pairs.empty()) throw DataError("no ground-truth sequences under " + a.gt);

  metrics::EvalReport report;
  for (const auto& [fdir, gdir] : pairs) {
    const auto frames = read_frames_dir(fdir);
    const auto seq = sim::read_sequence(gdir);
    auto row = metrics::evaluate_sequence(frames, seq.frames, seq.frame_times, seq.flows, opt);
    row.name = gdir.filename().string();
    report.rows.push_back(row);
  }
  const fs::path out = a.out.empty() ? fs::path(a.frames) / "report.csv" : fs::path(a.out);
  write_text(out, report.to_csv());
  std::cout << report.to_table();
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string data;
  std::string out = "sweep.csv";
  std::string config;
  std::vector<std::string> set;
  int epochs = 1;
  bool disable_recurrence = false;
  std::vector<int> encoders{2, 3, 4};
  std::vector<int> residual{0, 1, 2};
  std::vector<std::string> skips{"sum", "concat"};
  std::vector<int> channels{8, 16, 32, 64};
  int timing_windows = 4;
};

void cmd_sweep(const SweepArgs& a, const CLI::App& sub) {
  train::RunConfig rc = resolve_run_config(a.config, a.set, {});
  rc.train.epochs = a.epochs;
  const PreparedData data = prepare_data(a.data, rc);
  if (data.validation.empty()) throw DataError("sweep needs at least two sequences (one for validation)");
  train::SweepGrid grid;
  grid.num_encoders = a.encoders;
  grid.num_residual = a.residual;
  grid.skips.clear();
  for (const auto& s : a.skips) grid.skips.push_back(nn::parse_skip_mode(s));
  grid.base_channels = a.channels;
  train::SweepOptions so;
  so.disable_recurrence = a.disable_recurrence;
  so.timing_windows = a.timing_windows;
  info("sweeping " + std::to_string(grid.configs(rc.network).size()) + " configurations");
  const auto rows = train::run_sweep(grid, rc.network, rc.train, data.samples, data.validation, so);
  write_text(a.out, train::sweep_csv(rows));
  const fs::path parent = fs::path(a.out).parent_path();
  write_manifest(parent.empty() ? fs::path(".") : parent, sub, train::describe(rc));
  std::cout << train::sweep_csv(rows);
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string checkpoint;
  pipeline::BenchOptions options;
};

void cmd_bench(const BenchArgs& a, const CLI::App&) {
  nn::NetworkConfig config;
  nn::ModelWeights<float> weights;
  if (!a.checkpoint.empty()) {
    nn::Checkpoint ck = nn::load_checkpoint_file(a.checkpoint);
    config = ck.config;
    weights = std::move(ck.weights);
  } else {
    weights = nn::init_weights<float>(config, a.options.seed);
  }
  const auto report = pipeline::run_benchmark(weights, config, a.options);
  std::cout << "kernels: " << simd::isa_name(simd::active().isa) << "\n" << report.to_text();
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  std::uint64_t seed = 0;
  std::size_t max_entries = 24;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  const auto cases = train::run_gradcheck_suite(a.seed, a.max_entries);
  bool ok = true;
  for (const auto& c : cases) {
    std::printf("%-24s max rel err %.3e (limit %.0e) worst %s[%zu] %s\n", c.name.c_str(), c.result.max_rel_error,
                c.threshold, c.result.worst_input.c_str(), c.result.worst_index, c.passed() ? "ok" : "FAIL");
    ok = ok && c.passed();
  }
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Events-to-video reconstruction toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (1 = bitwise reproducible)")->check(CLI::PositiveNumber);
  app.add_option("-v,--verbosity", g_verbosity, "0 = quiet, 1 = progress");

  SimulateArgs sim_a;
  auto* sim = app.add_subcommand("simulate", "Simulate a dataset of event sequences with ground truth");
  sim->add_option("-o,--out", sim_a.out, "Output dataset directory")->required();
  sim->add_option("--count", sim_a.count, "Number of sequences");
  sim->add_option("--duration", sim_a.duration, "Sequence duration (s)");
  sim->add_option("--size", sim_a.size, "Square sensor size (pixels)");
  sim->add_option("--width", sim_a.width, "Sensor width (overrides --size)");
  sim->add_option("--height", sim_a.height, "Sensor height (overrides --size)");
  sim->add_option("--f-gt", sim_a.f_gt, "Ground-truth frame rate (Hz)");
  sim->add_option("--f-sim", sim_a.f_sim, "Internal render rate (Hz)");
  sim->add_option("--seed", sim_a.seed, "Random seed");
  sim->add_option("--motion-scale", sim_a.motion_scale, "Camera motion amplitude multiplier");
  sim->add_option("--texture", sim_a.texture, "Texture image (PGM/PPM) instead of procedural textures");

  TrainArgs tr_a;
  auto* tr = app.add_subcommand("train", "Train the reconstruction network");
  tr->add_option("-d,--data", tr_a.data, "Dataset directory")->required();
  tr->add_option("-o,--out", tr_a.out, "Output directory (checkpoint, curves, manifest)")->required();
  tr->add_option("-c,--config", tr_a.config, "key=value configuration file");
  tr->add_option("--set", tr_a.set, "Override one configuration key (key=value)");
  tr->add_option("--resume", tr_a.resume, "Continue from a checkpoint");
  tr->add_option("--max-steps", tr_a.max_steps, "Stop after this many optimizer steps");
  const std::vector<std::pair<std::string, std::string>> shortcut_flags = {
      {"--epochs", "epochs"},         {"--batch-size", "batch_size"}, {"--unroll", "unroll"},
      {"--lr", "lr"},                 {"--crop", "crop"},             {"--lambda-tc", "lambda_tc"},
      {"--alpha", "alpha"},           {"--l0", "l0"},                 {"--seed", "seed"},
      {"--num-encoders", "num_encoders"}, {"--num-residual", "num_residual"},
      {"--base-channels", "base_channels"}, {"--skip-mode", "skip_mode"}, {"--recurrent", "recurrent"},
      {"--augment", "augment"},       {"--window-mode", "window_mode"}, {"--window-events", "window_events"},
      {"--loss", "loss"},             {"--val-ratio", "val_ratio"}};
  std::map<std::string, std::string> shortcut_values;
  for (const auto& [flag, key] : shortcut_flags)
    tr->add_option(flag, shortcut_values[key], "Sets config key '" + key + "'");

  ReconstructArgs rc_a;
  auto* rc = app.add_subcommand("reconstruct", "Reconstruct frames from an event file");
  rc->add_option("-m,--checkpoint", rc_a.checkpoint, "Model checkpoint")->required();
  rc->add_option("-e,--events", rc_a.events, "Event file (text or EVB1)")->required();
  rc->add_option("-o,--out", rc_a.out, "Output frame directory")->required();
  rc->add_option("--window-count", rc_a.window_count, "Events per window (default 10000)");
  rc->add_option("--window-duration-ms", rc_a.window_duration_ms, "Window duration (ms)");
  rc->add_option("--hfr-shift", rc_a.hfr_shift, "High-framerate shift D (events)");
  rc->add_option("--deflicker", rc_a.deflicker, "EMA deflicker strength in [0,1)");
  rc->add_flag("--color", rc_a.color, "Color reconstruction from a CFA sensor");
  rc->add_option("--cfa", rc_a.cfa, "CFA phase pattern (RGGB, GRBG, BGGR, GBRG)");
  rc->add_flag("--no-postprocess", rc_a.no_postprocess, "Write raw network output");
  rc->add_flag("--skip-empty", rc_a.skip_empty, "Skip empty duration windows instead of feeding zeros");
  rc->add_option("--decay-steps", rc_a.decay_steps, "Also write decay.csv for K empty steps after the stream");

  EvalArgs ev_a;
  auto* ev = app.add_subcommand("eval", "Evaluate reconstructions against ground truth");
  ev->add_option("-f,--frames", ev_a.frames, "Frame directory (or root of per-sequence directories)")->required();
  ev->add_option("-g,--gt", ev_a.gt, "Ground-truth sequence directory or dataset root")->required();
  ev->add_option("-o,--out", ev_a.out, "Report CSV (default <frames>/report.csv)");
  ev->add_option("--tolerance-ms", ev_a.tolerance_ms, "Timestamp matching tolerance (ms)");
  ev->add_option("--skip-head-s", ev_a.skip_head_s, "Ignore ground truth in the first seconds");
  ev->add_option("--skip-tail-s", ev_a.skip_tail_s, "Ignore ground truth in the last seconds");
  ev->add_flag("--no-hist-eq", ev_a.no_hist_eq, "Skip local histogram equalization");
  ev->add_option("--alpha", ev_a.alpha, "Occlusion mask sharpness");

  SweepArgs sw_a;
  auto* sw = app.add_subcommand("sweep", "Architecture sweep over the encoder/residual/skip/channel grid");
  sw->add_option("-d,--data", sw_a.data, "Dataset directory")->required();
  sw->add_option("-o,--out", sw_a.out, "Output CSV");
  sw->add_option("-c,--config", sw_a.config, "key=value configuration file");
  sw->add_option("--set", sw_a.set, "Override one configuration key (key=value)");
  sw->add_option("--epochs", sw_a.epochs, "Training budget per configuration");
  sw->add_flag("--disable-recurrence", sw_a.disable_recurrence, "Train without the recurrent connection");
  sw->add_option("--encoders", sw_a.encoders, "Encoder counts")->delimiter(',');
  sw->add_option("--residual", sw_a.residual, "Residual block counts")->delimiter(',');
  sw->add_option("--skips", sw_a.skips, "Skip modes")->delimiter(',');
  sw->add_option("--channels", sw_a.channels, "Base channel counts")->delimiter(',');
  sw->add_option("--timing-windows", sw_a.timing_windows, "Windows timed per configuration");

  BenchArgs be_a;
  auto* be = app.add_subcommand("bench", "Per-stage timing of one event window");
  be->add_option("-m,--checkpoint", be_a.checkpoint, "Model checkpoint (default: untrained default network)");
  be->add_option("--width", be_a.options.width, "Sensor width");
  be->add_option("--height", be_a.options.height, "Sensor height");
  be->add_option("--events", be_a.options.events, "Events per window");
  be->add_option("--repeats", be_a.options.repeats, "Timed repetitions");
  be->add_option("--seed", be_a.options.seed, "Random seed");

  GradcheckArgs gc_a;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference checks of every layer and loss");
  gc->add_option("--seed", gc_a.seed, "Random seed");
  gc->add_option("--max-entries", gc_a.max_entries, "Entries probed per tensor (0 = all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  set_thread_count(threads);

  try {
    if (*sim) cmd_simulate(sim_a, *sim);
    if (*tr) {
      for (const auto& [flag, key] : shortcut_flags)
        if (tr->count(flag) > 0) tr_a.shortcuts[key] = shortcut_values[key];
      cmd_train(tr_a, *tr);
    }
    if (*rc) cmd_reconstruct(rc_a, *rc);
    if (*ev) cmd_eval(ev_a, *ev);
    if (*sw) cmd_sweep(sw_a, *sw);
    if (*be) cmd_bench(be_a, *be);
    if (*gc) return cmd_gradcheck(gc_a);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
