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

// Synthetic banding corpus: smooth backgrounds quantized to a few bits
// (banded) against dithered 8-bit renditions of the same content and
// high-frequency textures (non-banded).

#ifndef FSBAND_SYNTH_HPP_
#define FSBAND_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fsband/image.hpp"

namespace fsband {

enum class BackgroundKind {
  kLinearGradient,
  kRadialGradient,
  kLowFreqNoise,
  kTexture,
};

const char* to_string(BackgroundKind kind);
// Throws kUnknownKind.
BackgroundKind parse_background_kind(const std::string& name);
bool is_smooth(BackgroundKind kind) noexcept;

// Affine ramp from `lo` to `hi` along direction `angle` (radians), spanning
// the full extent of the plane. lo == hi gives a constant plane.
std::vector<double> linear_gradient(int width, int height, double lo,
                                    double hi, double angle);

// Random background of the given kind; deterministic in (kind, size, seed).
std::vector<double> gen_background_plane(BackgroundKind kind, int width,
                                         int height, std::uint64_t seed);
Patch gen_background(BackgroundKind kind, int side, std::uint64_t seed);
Image gen_background_image(BackgroundKind kind, int width, int height,
                           std::uint64_t seed);

// Uniform quantization to 2^bits levels: round(v (2^bits - 1)) / (2^bits - 1).
// Throws kInvalidArgument unless 2 <= bits <= 7.
std::vector<double> quantize_levels(std::span<const double> values, int bits);
Patch apply_banding(const Patch& patch, int bits);
Image apply_banding(const Image& image, int bits);

// 8-bit rendition with triangular dither of one 8-bit step added before
// rounding; deterministic in seed.
std::vector<double> dither_to_8bit(std::span<const double> values,
                                   std::uint64_t seed);
std::vector<double> round_to_8bit(std::span<const double> values);

inline constexpr int kMinBandingBits = 2;
inline constexpr int kMaxBandingBits = 7;
inline constexpr int kNegativeBits = 8;

struct SynthConfig {
  int count_per_class = 100;
  int side = kDefaultPatchSide;
  std::vector<BackgroundKind> kinds{
      BackgroundKind::kLinearGradient, BackgroundKind::kRadialGradient,
      BackgroundKind::kLowFreqNoise, BackgroundKind::kTexture};
  std::vector<int> bits{3, 4, 5, 6};
  bool dither_negatives = true;
  std::uint64_t seed = 7;
  int jobs = 1;  // output does not depend on it

  void validate() const;
};

struct ManifestRecord {
  std::string id;
  int label = 0;
  std::string kind;  // a BackgroundKind name, or "external"
  int bits = 0;      // banding bits for positives, 8 for negatives
  std::uint64_t seed = 0;
  std::string path;  // relative to the manifest directory; may be empty
  bool dither = false;
  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::size_t count(int label) const;
};

struct Corpus {
  DatasetManifest manifest;
  std::vector<Patch> patches;  // aligned with manifest.records
  std::vector<int> labels() const;
};

// Balanced corpus: positives are smooth backgrounds quantized to one of
// cfg.bits; every third negative is a texture (when enabled), the rest are
// the smooth kinds rendered at 8 bits (dithered when cfg.dither_negatives).
Corpus gen_dataset(const SynthConfig& cfg);

// Rebuilds the patch of a synthetic record bit-exactly from its metadata.
Patch regenerate(const ManifestRecord& record, int side);

// Writes <dir>/patches/<id>.pgm (16-bit) and <dir>/manifest.jsonl; fills
// each record's path. Throws kIo.
void write_dataset(Corpus& corpus, const std::filesystem::path& dir);

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);
// JSON Lines reader. Throws kFileNotFound, kCorruptData.
DatasetManifest read_manifest(const std::filesystem::path& path);

// Loads every record: from its file when `path` is set (relative paths are
// resolved against `base_dir`), else regenerated from metadata. Throws
// kShapeMismatch if a stored patch is not side x side.
std::vector<Patch> load_corpus_patches(const DatasetManifest& manifest,
                                       const std::filesystem::path& base_dir,
                                       int side);

}  // namespace fsband

#endif  // FSBAND_SYNTH_HPP_
