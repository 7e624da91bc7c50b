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

// Luma images, square patches and the non-overlapping patch tiling.

#ifndef FSBAND_IMAGE_HPP_
#define FSBAND_IMAGE_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fsband {

// Row-major luma matrix with top-left origin. Values lie in [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  // Throws kInvalidArgument when the size is wrong or a value is outside
  // [0,1] or not finite.
  Image(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  double at(int row, int col) const { return data_[index(row, col)]; }
  double& at(int row, int col) { return data_[index(row, col)]; }

  std::span<const double> pixels() const noexcept { return data_; }
  std::span<double> pixels() noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct PatchOrigin {
  int row = 0;
  int col = 0;
  friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

// A side x side luma tile. `origin` is the top-left corner in the source
// image; padded pixels may fall outside the source.
struct Patch {
  int side = 0;
  PatchOrigin origin;
  std::vector<double> data;

  double at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * side + col];
  }
  double& at(int row, int col) {
    return data[static_cast<std::size_t>(row) * side + col];
  }

  friend bool operator==(const Patch&, const Patch&) = default;
};

inline constexpr int kMinPatchSide = 8;
inline constexpr int kDefaultPatchSide = 64;

// Builds a patch from raw values; validates side >= 8 and the value range.
Patch make_patch(int side, std::vector<double> data, PatchOrigin origin = {});

enum class PadPolicy { kReflect, kClamp };

const char* to_string(PadPolicy policy);
PadPolicy parse_pad_policy(const std::string& name);

struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int side = 0;
  int image_width = 0;
  int image_height = 0;
  PadPolicy pad_policy = PadPolicy::kReflect;
  std::vector<Patch> patches;  // row-major, M = rows * cols

  std::size_t size() const noexcept { return patches.size(); }
};

// Maps an out-of-range index into [0, n) by half-sample mirroring (the
// edge sample is repeated), periodic for offsets larger than n.
int reflect_index(int i, int n) noexcept;
int clamp_index(int i, int n) noexcept;
int border_index(int i, int n, PadPolicy policy) noexcept;

// Non-overlapping tiling; boundary patches are padded per `policy`.
// Throws kInvalidArgument for side < 8 and kPatchTooLarge when side exceeds
// four times the smaller image dimension.
PatchGrid tile_patches(const Image& image, int side,
                       PadPolicy policy = PadPolicy::kReflect);

// Reassembles the patch interiors, dropping padding.
Image stitch(const PatchGrid& grid);

// Generic tiling of an unconstrained plane (used for whole-image frequency
// maps whose values are not luma). Returns row-major tiles of side*side.
std::vector<std::vector<double>> tile_plane(std::span<const double> plane,
                                            int width, int height, int side,
                                            PadPolicy policy);

// Raster I/O. PNG (8/16-bit gray or RGB, alpha ignored) and binary PGM/PPM
// (P5/P6, maxval up to 65535). RGB is reduced to luma with
// 0.299/0.587/0.114 weights.
Image load_image(const std::filesystem::path& path);

// Writes a binary PGM with the given maxval (255 or 65535).
void save_pgm(const std::filesystem::path& path, const Image& image,
              int maxval = 255);
// Writes an 8- or 16-bit grayscale PNG.
void save_png(const std::filesystem::path& path, const Image& image,
              int bit_depth = 8);

// Rescales arbitrary nonnegative values to [0,1] by min-max; a constant
// plane maps to zeros. Reports the range used.
struct Normalization {
  double min = 0.0;
  double max = 0.0;
};
Image normalize_minmax(std::span<const double> values, int width, int height,
                       Normalization* used = nullptr);

}  // namespace fsband

#endif  // FSBAND_IMAGE_HPP_
