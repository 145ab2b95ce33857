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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "e2v/common.hpp"
#include "e2v/events/cfa.hpp"
#include "e2v/events/event_io.hpp"
#include "e2v/events/voxel_grid.hpp"
#include "e2v/events/windowing.hpp"
#include "helpers.hpp"

using namespace e2v;
using namespace e2v::events;

namespace {

EventStream stream_at(std::initializer_list<double> times, int w = 8, int h = 8) {
  EventStream s{w, h, {}};
  std::uint16_t x = 0;
  for (double t : times) s.events.push_back({t, static_cast<std::uint16_t>(x++ % w), 0, 1});
  return s;
}

EventWindow whole(const EventStream& s) {
  return {s.events, s.events.empty() ? 0.0 : s.events.front().t, s.events.empty() ? 0.0 : s.events.back().t};
}

}  // namespace

TEST_CASE("text parser: single record") {
  const EventStream s = parse_event_text("240 180\n0.10 5 7 1");
  CHECK(s.width == 240);
  CHECK(s.height == 180);
  REQUIRE(s.events.size() == 1);
  CHECK(s.events[0].t == doctest::Approx(0.10));
  CHECK(s.events[0].x == 5);
  CHECK(s.events[0].y == 7);
  CHECK(s.events[0].polarity == 1);
}

TEST_CASE("text parser: p=0 maps to -1, blank lines ignored") {
  const EventStream s = parse_event_text("4 4\n\n0.1 1 1 0\n0.2 2 2 -1\n\n");
  REQUIRE(s.events.size() == 2);
  CHECK(s.events[0].polarity == -1);
  CHECK(s.events[1].polarity == -1);
}

TEST_CASE("text parser: rejects malformed input with line number") {
  CHECK_THROWS_AS(parse_event_text("240 180\n0.1 300 7 1"), DataError);
  CHECK_THROWS_AS(parse_event_text("240 180\n0.2 1 1 1\n0.1 1 1 1"), DataError);
  CHECK_THROWS_AS(parse_event_text("240\n"), DataError);
  CHECK_THROWS_AS(parse_event_text(""), DataError);
  try {
    parse_event_text("10 10\n0.1 1 1 1\n0.2 1 1 2\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find('3') != std::string::npos);
  }
}

TEST_CASE("text parser: every grammar-breaking mutation of a valid line is rejected") {
  const char* bad[] = {"0.1 1 1",     "0.1 1 1 1 1", "x 1 1 1",  "0.1 a 1 1", "0.1 1 b 1", "0.1 1 1 c",
                       "0.1 -1 1 1",  "0.1 1 -1 1",  "0.1 1 1 2", "0.1 1.5 1 1", "nan 1 1 1", "0.1 1 1 1x"};
  for (const char* line : bad) {
    CAPTURE(line);
    CHECK_THROWS_AS(parse_event_text(std::string("10 10\n") + line + "\n"), DataError);
  }
}

TEST_CASE("text format round-trip") {
  std::mt19937_64 rng(3);
  const EventStream s = testing::random_stream(rng, 200, 32, 24);
  const EventStream back = parse_event_text(format_event_text(s));
  REQUIRE(back.events.size() == s.events.size());
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    CHECK(back.events[i].x == s.events[i].x);
    CHECK(back.events[i].polarity == s.events[i].polarity);
    CHECK(back.events[i].t == doctest::Approx(s.events[i].t).epsilon(1e-12));
  }
}

TEST_CASE("binary format") {
  SUBCASE("empty stream is a bare header") {
    EventStream s{240, 180, {}};
    const auto bytes = write_event_binary(s);
    CHECK(bytes.size() == kEventBinaryHeaderSize);
    CHECK(read_event_binary(bytes) == s);
  }
  SUBCASE("round-trip of 1000 random events") {
    std::mt19937_64 rng(1);
    const EventStream s = testing::random_stream(rng, 1000, 240, 180);
    const auto bytes = write_event_binary(s);
    CHECK(bytes.size() == kEventBinaryHeaderSize + 1000 * kEventBinaryRecordSize);
    CHECK(read_event_binary(bytes) == s);
  }
  SUBCASE("count larger than payload is truncation") {
    std::mt19937_64 rng(2);
    const EventStream s = testing::random_stream(rng, 3, 16, 16);
    auto bytes = write_event_binary(s);
    bytes[8] = 5;  // u64 count low byte
    CHECK_THROWS_AS(read_event_binary(bytes), DataError);
  }
  SUBCASE("bad magic") {
    auto bytes = write_event_binary(EventStream{4, 4, {}});
    bytes[0] = 'X';
    CHECK_THROWS_AS(read_event_binary(bytes), DataError);
  }
  SUBCASE("file round-trip by extension") {
    std::mt19937_64 rng(5);
    const EventStream s = testing::random_stream(rng, 50, 16, 16);
    const auto dir = testing::temp_dir("events_io");
    save_events(s, dir / "a.evb");
    CHECK(load_events(dir / "a.evb") == s);
    save_events(s, dir / "a.txt");
    CHECK(load_events(dir / "a.txt").events.size() == 50);
  }
}

TEST_CASE("window_by_count") {
  CHECK(window_by_count(stream_at({0, 1, 2, 3, 4, 5, 6}), 7).size() == 1);
  const EventStream ten = stream_at({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto w = window_by_count(ten, 4);
  REQUIRE(w.size() == 2);
  CHECK(dropped_by_count(ten, 4) == 2);
  CHECK(w[0].events.data() == ten.events.data());
  CHECK(w[1].events.data() == ten.events.data() + 4);
  CHECK(w[1].t_end == 7.0);
  CHECK(window_by_count(stream_at({0, 1, 2}), 5).empty());
  CHECK_THROWS_AS(window_by_count(ten, 0), UsageError);
}

TEST_CASE("window_by_duration") {
  SUBCASE("half-open intervals") {
    const auto w = window_by_duration(stream_at({0, 0.04, 0.06}), 0.05);
    REQUIRE(w.size() == 2);
    CHECK(w[0].size() == 2);
    CHECK(w[1].size() == 1);
  }
  SUBCASE("boundary event opens the next window") {
    const auto w = window_by_duration(stream_at({0, 0.05}), 0.05);
    REQUIRE(w.size() == 2);
    CHECK(w[0].size() == 1);
    CHECK(w[1].size() == 1);
  }
  SUBCASE("trailing empties with an explicit origin") {
    const auto w = window_by_duration(stream_at({0.001, 0.002, 0.049}), 0.005, 0.0);
    REQUIRE(w.size() == 10);
    CHECK(w[0].size() == 2);
    for (int k = 1; k < 9; ++k) CHECK(w[k].empty());
    CHECK(w[9].size() == 1);
  }
  SUBCASE("tau 5 ms over 50 ms gives 10 windows") {
    std::vector<double> t;
    for (int i = 0; i < 50; ++i) t.push_back(i * 0.001);
    t.push_back(0.0499);
    CHECK(window_by_duration(stream_at(std::initializer_list<double>{}), 0.005).empty());
    EventStream s{8, 8, {}};
    for (double ti : t) s.events.push_back({ti, 0, 0, 1});
    CHECK(window_by_duration(s, 0.005).size() == 10);
  }
  CHECK_THROWS_AS(window_by_duration(stream_at({0}), 0.0), UsageError);
  CHECK_THROWS_AS(window_by_duration(stream_at({0}), -1.0), UsageError);
}

TEST_CASE("voxel grid: endpoints and bilinear split") {
  EventStream s{4, 1, {}};
  s.events.push_back({0.0, 0, 0, 1});
  s.events.push_back({0.375, 2, 0, 1});
  s.events.push_back({1.0, 1, 0, 1});
  const EventTensor t = encode_voxel_grid(whole(s), 5, 1, 4);
  CHECK(t.at(0, 0, 0) == 1.0);
  CHECK(t.at(4, 0, 1) == 1.0);
  CHECK(t.at(1, 0, 2) == doctest::Approx(0.5));
  CHECK(t.at(2, 0, 2) == doctest::Approx(0.5));
  CHECK(t.sum() == doctest::Approx(3.0));
}

TEST_CASE("voxel grid: equal timestamps go to bin 0, empty window throws") {
  EventStream s{2, 2, {{0.5, 0, 0, 1}, {0.5, 1, 1, -1}}};
  const EventTensor t = encode_voxel_grid(whole(s), 3, 2, 2);
  CHECK(t.at(0, 0, 0) == 1.0);
  CHECK(t.at(0, 1, 1) == -1.0);
  EventStream empty{2, 2, {}};
  CHECK_THROWS_AS(encode_voxel_grid(whole(empty), 3, 2, 2), UsageError);
  CHECK(EventTensor::zeros(3, 2, 2).sum() == 0.0);
}

TEST_CASE("voxel grid: conservation against a direct polarity sum") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const EventStream s = testing::random_stream(rng, 1000, 17, 11);
    const double direct = std::accumulate(s.events.begin(), s.events.end(), 0.0,
                                          [](double a, const Event& e) { return a + e.polarity; });
    const EventTensor t = encode_voxel_grid(whole(s), 5, 11, 17);
    CHECK(std::abs(t.sum() - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("normalize_tensor") {
  EventTensor t = EventTensor::zeros(1, 1, 4);
  t.values = {2, 0, 4, 0};
  normalize_tensor(t);
  CHECK(t.values[0] == doctest::Approx(-1.0));
  CHECK(t.values[1] == 0.0);
  CHECK(t.values[2] == doctest::Approx(1.0));

  EventTensor z = EventTensor::zeros(2, 2, 2);
  normalize_tensor(z);
  CHECK(z.sum() == 0.0);

  EventTensor one = EventTensor::zeros(1, 1, 3);
  one.values[1] = 5.0;
  normalize_tensor(one);
  CHECK(one.values[1] == 0.0);
}

TEST_CASE("split_cfa") {
  EventStream s{4, 4, {{0.0, 0, 0, 1}, {0.1, 3, 2, -1}, {0.2, 1, 1, 1}, {0.3, 2, 3, 1}}};
  const auto parts = split_cfa(s);
  REQUIRE(parts[0].events.size() == 1);
  CHECK(parts[0].width == 2);
  CHECK(parts[0].events[0].x == 0);
  // (3,2): x odd, y even -> phase 1 (Green1), coordinate (1,1)
  REQUIRE(parts[static_cast<int>(CfaColor::Green1)].events.size() == 1);
  CHECK(parts[static_cast<int>(CfaColor::Green1)].events[0].x == 1);
  CHECK(parts[static_cast<int>(CfaColor::Green1)].events[0].y == 1);
  CHECK(parts[static_cast<int>(CfaColor::Blue)].events.size() == 1);
  CHECK(parts[static_cast<int>(CfaColor::Green2)].events.size() == 1);

  std::mt19937_64 rng(4);
  const EventStream big = testing::random_stream(rng, 500, 16, 12);
  const auto split = split_cfa(big, CfaPattern::parse("GBRG"));
  std::size_t total = 0;
  for (const auto& p : split) {
    total += p.events.size();
    for (std::size_t i = 1; i < p.events.size(); ++i) CHECK(p.events[i - 1].t <= p.events[i].t);
  }
  CHECK(total == big.events.size());

  CHECK_THROWS_AS(split_cfa(EventStream{5, 4, {}}), UsageError);
  CHECK_THROWS_AS(CfaPattern::parse("RGB"), UsageError);
}
