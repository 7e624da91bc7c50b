// Copyright 2026 The fsband Authors. All rights reserved.
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

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fsband/error.hpp"
#include "fsband/net.hpp"

namespace fsband {

namespace {

constexpr unsigned char kMagic[4] = {'F', 'S', 'B', 'D'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    }
  }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }
  std::vector<unsigned char>& data() { return out_; }

 private:
  std::vector<unsigned char> out_;
};

class Reader {
 public:
  Reader(std::span<const unsigned char> in, std::string origin)
      : in_(in), origin_(std::move(origin)) {}

  template <typename U>
  U le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<U>(in_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (remaining() < n) {
      throw Error(ErrorCode::kCorruptData, "model file layout truncated",
                  origin_);
    }
  }

  std::span<const unsigned char> in_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const unsigned char> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<unsigned char> serialize_model(const Model& model) {
  const NetConfig& cfg = model.config;
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.le<std::uint16_t>(kModelFormatVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(cfg.branch_channels.size()));
  for (int c : cfg.branch_channels) w.le<std::int32_t>(c);
  w.le<std::int32_t>(cfg.early_tap_channels);
  w.le<std::int32_t>(cfg.fused_dim);
  w.le<std::int32_t>(cfg.input_side);
  w.le<std::uint8_t>(cfg.dual_branch ? 1 : 0);
  w.le<std::uint64_t>(cfg.seed);
  model.for_each_tensor([&](const Tensor<float>& t) {
    for (float v : t) w.f32(v);
  });
  const std::uint32_t crc = crc_of(w.data());
  w.le<std::uint32_t>(crc);
  return std::move(w.data());
}

Model deserialize_model(std::span<const unsigned char> bytes,
                        const std::string& origin) {
  constexpr std::size_t kHeader = sizeof(kMagic) + sizeof(std::uint16_t);
  if (bytes.size() >= sizeof(kMagic) &&
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kCorruptData, "not a model file (bad magic)", origin);
  }
  if (bytes.size() < kHeader + sizeof(std::uint32_t)) {
    throw Error(ErrorCode::kChecksumMismatch, "model file truncated", origin);
  }
  const std::uint16_t version =
      static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model format version " + std::to_string(version) +
                    ", expected " + std::to_string(kModelFormatVersion),
                origin);
  }
  const std::size_t body = bytes.size() - sizeof(std::uint32_t);
  Reader tail(bytes.subspan(body), origin);
  if (crc_of(bytes.first(body)) != tail.le<std::uint32_t>()) {
    throw Error(ErrorCode::kChecksumMismatch, "model checksum mismatch", origin);
  }

  Reader r(bytes.subspan(kHeader, body - kHeader), origin);
  NetConfig cfg;
  const std::uint32_t stages = r.le<std::uint32_t>();
  if (stages == 0 || stages > 64) {
    throw Error(ErrorCode::kCorruptData, "implausible stage count", origin);
  }
  cfg.branch_channels.clear();
  for (std::uint32_t s = 0; s < stages; ++s) {
    cfg.branch_channels.push_back(r.le<std::int32_t>());
  }
  cfg.early_tap_channels = r.le<std::int32_t>();
  cfg.fused_dim = r.le<std::int32_t>();
  cfg.input_side = r.le<std::int32_t>();
  cfg.dual_branch = r.le<std::uint8_t>() != 0;
  cfg.seed = r.le<std::uint64_t>();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptData, e.what(), origin);
  }

  Model model = init_model(cfg);
  if (r.remaining() != model.parameter_count() * sizeof(float)) {
    throw Error(ErrorCode::kCorruptData,
                "parameter block does not match the stored configuration",
                origin);
  }
  model.for_each_tensor([&](Tensor<float>& t) {
    for (float& v : t) v = r.f32();
  });
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model file", path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write", path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such model file", path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file", path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  return deserialize_model(bytes, path.string());
}

}  // namespace fsband
