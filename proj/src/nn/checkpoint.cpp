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

#include "e2v/nn/checkpoint.hpp"

#include <zlib.h>

#include "e2v/bytes.hpp"
#include "e2v/events/event_io.hpp"

namespace e2v::nn {
namespace {

std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, data.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_tensor_data(bytes::Writer& w, const Tensor<float>& t) {
  for (float v : t.data) w.put<float>(v);
}

void put_tensors(bytes::Writer& w, const std::map<std::string, Tensor<float>>& tensors) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [key, t] : tensors) {
    w.put_string(key);
    for (int d : {t.shape.n, t.shape.c, t.shape.h, t.shape.w}) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
    put_tensor_data(w, t);
  }
}

Tensor<float> get_tensor_data(bytes::Reader& r, Shape shape) {
  r.require(shape.numel() * sizeof(float));
  Tensor<float> t(shape);
  for (float& v : t.data) v = r.get<float>();
  return t;
}

std::map<std::string, Tensor<float>> get_tensors(bytes::Reader& r) {
  std::map<std::string, Tensor<float>> out;
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string key = r.get_string();
    Shape s;
    s.n = static_cast<int>(r.get<std::uint32_t>());
    s.c = static_cast<int>(r.get<std::uint32_t>());
    s.h = static_cast<int>(r.get<std::uint32_t>());
    s.w = static_cast<int>(r.get<std::uint32_t>());
    out.emplace(std::move(key), get_tensor_data(r, s));
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ck) {
  ck.config.validate();
  check_weights(ck.weights, ck.config);
  bytes::Writer w;
  w.put_raw("E2V1");
  w.put<std::uint32_t>(kCheckpointVersion);
  const NetworkConfig& c = ck.config;
  for (int v : {c.num_encoders, c.num_residual, c.base_channels, c.skip == SkipMode::Concat ? 1 : 0, c.input_bins,
                c.unroll, c.recurrent ? 1 : 0, c.head_kernel})
    w.put<std::uint32_t>(static_cast<std::uint32_t>(v));
  put_tensors(w, ck.weights.params);
  put_tensors(w, ck.weights.buffers);
  w.put<std::uint8_t>(ck.optimizer ? 1 : 0);
  if (ck.optimizer) {
    w.put<std::uint64_t>(static_cast<std::uint64_t>(ck.optimizer->step));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ck.optimizer->m.size()));
    for (const auto& [key, m] : ck.optimizer->m) {
      w.put_string(key);
      put_tensor_data(w, m);
      put_tensor_data(w, ck.optimizer->v.at(key));
    }
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ck.metadata.size()));
  for (const auto& [k, v] : ck.metadata) {
    w.put_string(k);
    w.put_string(v);
  }
  const std::uint32_t crc = crc32_of(w.buffer());
  w.put<std::uint32_t>(crc);
  return w.take();
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> data) {
  if (data.size() < 12) throw DataError("E2V1: truncated payload");
  if (std::string_view(reinterpret_cast<const char*>(data.data()), 4) != "E2V1") throw DataError("E2V1: bad magic");
  const auto body = data.first(data.size() - 4);
  bytes::Reader tail(data.last(4), "E2V1");
  if (crc32_of(body) != tail.get<std::uint32_t>()) throw DataError("E2V1: checksum mismatch (corrupt or truncated file)");

  bytes::Reader r(body, "E2V1");
  r.get_raw(4);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw DataError("E2V1: unsupported version " + std::to_string(version));
  Checkpoint ck;
  NetworkConfig& c = ck.config;
  c.num_encoders = static_cast<int>(r.get<std::uint32_t>());
  c.num_residual = static_cast<int>(r.get<std::uint32_t>());
  c.base_channels = static_cast<int>(r.get<std::uint32_t>());
  c.skip = r.get<std::uint32_t>() == 1 ? SkipMode::Concat : SkipMode::Sum;
  c.input_bins = static_cast<int>(r.get<std::uint32_t>());
  c.unroll = static_cast<int>(r.get<std::uint32_t>());
  c.recurrent = r.get<std::uint32_t>() != 0;
  c.head_kernel = static_cast<int>(r.get<std::uint32_t>());
  try {
    c.validate();
  } catch (const UsageError& e) {
    throw DataError(std::string("E2V1: invalid config: ") + e.what());
  }
  ck.weights.params = get_tensors(r);
  ck.weights.buffers = get_tensors(r);
  try {
    check_weights(ck.weights, c);
  } catch (const UsageError& e) {
    throw DataError(std::string("E2V1: ") + e.what());
  }
  if (r.get<std::uint8_t>() != 0) {
    AdamState<float> opt;
    opt.step = static_cast<long>(r.get<std::uint64_t>());
    const auto n = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n; ++i) {
      std::string key = r.get_string();
      const auto it = ck.weights.params.find(key);
      if (it == ck.weights.params.end()) throw DataError("E2V1: optimizer state for unknown key \"" + key + "\"");
      opt.m.emplace(key, get_tensor_data(r, it->second.shape));
      opt.v.emplace(key, get_tensor_data(r, it->second.shape));
    }
    ck.optimizer = std::move(opt);
  }
  const auto n_meta = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.get_string();
    ck.metadata[k] = r.get_string();
  }
  if (r.remaining() != 0) throw DataError("E2V1: trailing bytes");
  return ck;
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> data, const NetworkConfig& expected) {
  Checkpoint ck = load_checkpoint(data);
  const NetworkConfig& c = ck.config;
  auto mismatch = [](const char* key, long got, long want) {
    throw UsageError(std::string("checkpoint config mismatch: ") + key + " is " + std::to_string(got) +
                     ", expected " + std::to_string(want));
  };
  if (c.num_encoders != expected.num_encoders) mismatch("num_encoders", c.num_encoders, expected.num_encoders);
  if (c.num_residual != expected.num_residual) mismatch("num_residual", c.num_residual, expected.num_residual);
  if (c.base_channels != expected.base_channels) mismatch("base_channels", c.base_channels, expected.base_channels);
  if (c.skip != expected.skip) mismatch("skip", static_cast<long>(c.skip), static_cast<long>(expected.skip));
  if (c.input_bins != expected.input_bins) mismatch("input_bins", c.input_bins, expected.input_bins);
  if (c.recurrent != expected.recurrent) mismatch("recurrent", c.recurrent, expected.recurrent);
  if (c.head_kernel != expected.head_kernel) mismatch("head_kernel", c.head_kernel, expected.head_kernel);
  return ck;
}

void save_checkpoint_file(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  events::write_file_bytes(path, save_checkpoint(checkpoint));
}

Checkpoint load_checkpoint_file(const std::filesystem::path& path) {
  return load_checkpoint(events::read_file_bytes(path));
}

}  // namespace e2v::nn
