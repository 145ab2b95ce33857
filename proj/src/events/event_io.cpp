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

#include "e2v/events/event_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <iterator>
#include <sstream>

#include "e2v/bytes.hpp"
#include "e2v/common.hpp"

namespace e2v::events {

void validate(const EventStream& stream) {
  if (stream.width <= 0 || stream.height <= 0 || stream.width > 65535 || stream.height > 65535)
    throw DataError("invalid sensor size " + std::to_string(stream.width) + "x" + std::to_string(stream.height));
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    if (e.x >= stream.width || e.y >= stream.height)
      throw DataError("event " + std::to_string(i) + ": coordinate out of bounds");
    if (e.polarity != 1 && e.polarity != -1)
      throw DataError("event " + std::to_string(i) + ": polarity must be -1 or +1");
    if (!std::isfinite(e.t)) throw DataError("event " + std::to_string(i) + ": non-finite timestamp");
    if (e.t < last) throw DataError("event " + std::to_string(i) + ": timestamp decreases");
    last = e.t;
  }
}

namespace {

class LineTokens {
 public:
  explicit LineTokens(std::string_view line) : rest_(line) {}

  std::string_view next() {
    const auto b = rest_.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
      rest_ = {};
      return {};
    }
    rest_.remove_prefix(b);
    const auto e = rest_.find_first_of(" \t\r");
    auto tok = rest_.substr(0, e);
    rest_.remove_prefix(e == std::string_view::npos ? rest_.size() : e);
    return tok;
  }
  bool exhausted() { return next().empty(); }

 private:
  std::string_view rest_;
};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw DataError("line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  if (tok.empty()) fail(line, std::string("missing ") + what);
  if (tok.front() == '+') tok.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) fail(line, std::string("malformed ") + what);
  return value;
}

}  // namespace

EventStream parse_event_text(std::string_view text) {
  EventStream stream;
  std::size_t line_no = 0;
  bool have_header = false;
  double last_t = -std::numeric_limits<double>::infinity();
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    LineTokens tok(line);
    if (!have_header) {
      stream.width = parse_number<int>(tok.next(), line_no, "width");
      stream.height = parse_number<int>(tok.next(), line_no, "height");
      if (!tok.exhausted()) fail(line_no, "trailing tokens in header");
      if (stream.width <= 0 || stream.height <= 0 || stream.width > 65535 || stream.height > 65535)
        fail(line_no, "invalid sensor size");
      have_header = true;
      continue;
    }
    Event e;
    e.t = parse_number<double>(tok.next(), line_no, "timestamp");
    const long x = parse_number<long>(tok.next(), line_no, "x");
    const long y = parse_number<long>(tok.next(), line_no, "y");
    const int p = parse_number<int>(tok.next(), line_no, "polarity");
    if (!tok.exhausted()) fail(line_no, "trailing tokens");
    if (!std::isfinite(e.t)) fail(line_no, "non-finite timestamp");
    if (x < 0 || y < 0 || x >= stream.width || y >= stream.height) fail(line_no, "coordinate out of bounds");
    if (p != 0 && p != 1 && p != -1) fail(line_no, "polarity must be one of 0, 1, -1");
    if (e.t < last_t) fail(line_no, "timestamp decreases");
    last_t = e.t;
    e.x = static_cast<std::uint16_t>(x);
    e.y = static_cast<std::uint16_t>(y);
    e.polarity = p == 1 ? 1 : -1;
    stream.events.push_back(e);
  }
  if (!have_header) throw DataError("missing \"W H\" header line");
  return stream;
}

std::string format_event_text(const EventStream& stream) {
  std::string out = std::to_string(stream.width) + " " + std::to_string(stream.height) + "\n";
  out.reserve(out.size() + stream.events.size() * 32);
  char buf[64];
  for (const Event& e : stream.events) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.t);
    out.append(buf, ptr);
    out += ' ';
    out += std::to_string(e.x);
    out += ' ';
    out += std::to_string(e.y);
    out += e.polarity > 0 ? " 1\n" : " -1\n";
  }
  return out;
}

std::vector<std::uint8_t> write_event_binary(const EventStream& stream) {
  validate(stream);
  bytes::Writer w;
  w.buffer().reserve(kEventBinaryHeaderSize + kEventBinaryRecordSize * stream.events.size());
  w.put_raw(std::string_view(kEventBinaryMagic, 4));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(stream.width));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(stream.height));
  w.put<std::uint64_t>(stream.events.size());
  for (const Event& e : stream.events) {
    w.put<double>(e.t);
    w.put<std::uint16_t>(e.x);
    w.put<std::uint16_t>(e.y);
    w.put<std::int8_t>(e.polarity);
  }
  return w.take();
}

EventStream read_event_binary(std::span<const std::uint8_t> data) {
  bytes::Reader r(data, "EVB1");
  if (r.get_raw(4) != std::string_view(kEventBinaryMagic, 4)) throw DataError("EVB1: bad magic");
  EventStream stream;
  stream.width = r.get<std::uint16_t>();
  stream.height = r.get<std::uint16_t>();
  const auto count = r.get<std::uint64_t>();
  if (count > r.remaining() / kEventBinaryRecordSize) throw DataError("EVB1: truncated payload");
  stream.events.resize(count);
  for (Event& e : stream.events) {
    e.t = r.get<double>();
    e.x = r.get<std::uint16_t>();
    e.y = r.get<std::uint16_t>();
    e.polarity = r.get<std::int8_t>();
  }
  validate(stream);
  return stream;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

EventStream load_events(const std::filesystem::path& path) {
  const auto data = read_file_bytes(path);
  if (data.size() >= 4 && std::equal(data.begin(), data.begin() + 4, kEventBinaryMagic))
    return read_event_binary(data);
  return parse_event_text(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

void save_events(const EventStream& stream, const std::filesystem::path& path) {
  if (path.extension() == ".evb") {
    write_file_bytes(path, write_event_binary(stream));
    return;
  }
  validate(stream);
  const std::string text = format_event_text(stream);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace e2v::events
