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

#include "e2v/sim/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "e2v/bytes.hpp"
#include "e2v/common.hpp"
#include "e2v/events/event_io.hpp"

namespace e2v {

double Image::sample_clamped(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height - 1));
  const int x0 = std::min(static_cast<int>(x), width - 1);
  const int y0 = std::min(static_cast<int>(y), height - 1);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
  const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  for (auto& c : channels) c.assign(static_cast<std::size_t>(w) * h, 0.0);
}

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

struct Netpbm {
  int width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> pixels;
};

Netpbm read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  Netpbm img;
  if (magic == "P5") img.channels = 1;
  else if (magic == "P6") img.channels = 3;
  else throw DataError(path.string() + ": unsupported netpbm type " + magic);
  auto read_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = 0;
    if (!(in >> v)) throw DataError(path.string() + ": malformed header");
    return v;
  };
  img.width = read_int();
  img.height = read_int();
  const int maxval = read_int();
  if (img.width <= 0 || img.height <= 0 || maxval != 255) throw DataError(path.string() + ": expected 8-bit image");
  in.get();
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) throw DataError(path.string() + ": truncated");
  return img;
}

void write_netpbm(const std::filesystem::path& path, const char* magic, int w, int h,
                  const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << magic << "\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

void write_pgm(const Image& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> px(image.size());
  std::transform(image.data.begin(), image.data.end(), px.begin(), to_byte);
  write_netpbm(path, "P5", image.width, image.height, px);
}

Image read_pgm(const std::filesystem::path& path) {
  const Netpbm n = read_netpbm(path);
  Image img(n.width, n.height);
  if (n.channels == 1) {
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = n.pixels[i] / 255.0;
  } else {
    // Color input is reduced to Rec. 601 luma.
    for (std::size_t i = 0; i < img.size(); ++i)
      img.data[i] = (0.299 * n.pixels[3 * i] + 0.587 * n.pixels[3 * i + 1] + 0.114 * n.pixels[3 * i + 2]) / 255.0;
  }
  return img;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<std::uint8_t> px(3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) px[3 * i + c] = to_byte(image.channels[c][i]);
  write_netpbm(path, "P6", image.width, image.height, px);
}

RgbImage read_ppm(const std::filesystem::path& path) {
  const Netpbm n = read_netpbm(path);
  RgbImage img(n.width, n.height);
  const std::size_t count = static_cast<std::size_t>(n.width) * n.height;
  for (std::size_t i = 0; i < count; ++i)
    for (int c = 0; c < 3; ++c) img.channels[c][i] = n.pixels[i * n.channels + (n.channels == 3 ? c : 0)] / 255.0;
  return img;
}

std::vector<std::uint8_t> encode_flow(const FlowField& flow) {
  bytes::Writer w;
  w.put_raw("FLW1");
  w.put<std::uint16_t>(static_cast<std::uint16_t>(flow.width));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(flow.height));
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    w.put<float>(static_cast<float>(flow.dx[i]));
    w.put<float>(static_cast<float>(flow.dy[i]));
  }
  return w.take();
}

FlowField decode_flow(std::span<const std::uint8_t> data) {
  bytes::Reader r(data, "FLW1");
  if (r.get_raw(4) != "FLW1") throw DataError("FLW1: bad magic");
  const int w = r.get<std::uint16_t>();
  const int h = r.get<std::uint16_t>();
  FlowField flow(w, h);
  r.require(static_cast<std::size_t>(w) * h * 8);
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    flow.dx[i] = r.get<float>();
    flow.dy[i] = r.get<float>();
  }
  return flow;
}

void write_flow(const FlowField& flow, const std::filesystem::path& path) {
  events::write_file_bytes(path, encode_flow(flow));
}

FlowField read_flow(const std::filesystem::path& path) { return decode_flow(events::read_file_bytes(path)); }

}  // namespace e2v
