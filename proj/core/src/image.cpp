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

#include "fsband/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fsband/error.hpp"

namespace fsband {

namespace {

void check_luma(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "luma value " + std::to_string(v) + " outside [0,1]");
    }
  }
}

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  if (!std::isfinite(fill) || fill < 0.0 || fill > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "fill value outside [0,1]");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidArgument,
                "image data length does not match width * height");
  }
  check_luma(data_);
}

Patch make_patch(int side, std::vector<double> data, PatchOrigin origin) {
  if (side < kMinPatchSide) {
    throw Error(ErrorCode::kInvalidArgument,
                "patch side must be >= " + std::to_string(kMinPatchSide));
  }
  if (data.size() != static_cast<std::size_t>(side) * side) {
    throw Error(ErrorCode::kInvalidArgument, "patch data length != side^2");
  }
  check_luma(data);
  return Patch{side, origin, std::move(data)};
}

const char* to_string(PadPolicy policy) {
  return policy == PadPolicy::kReflect ? "reflect" : "clamp";
}

PadPolicy parse_pad_policy(const std::string& name) {
  if (name == "reflect") return PadPolicy::kReflect;
  if (name == "clamp") return PadPolicy::kClamp;
  throw Error(ErrorCode::kInvalidArgument, "unknown pad policy '" + name + "'");
}

int reflect_index(int i, int n) noexcept {
  if (n <= 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

int clamp_index(int i, int n) noexcept { return std::clamp(i, 0, n - 1); }

int border_index(int i, int n, PadPolicy policy) noexcept {
  return policy == PadPolicy::kReflect ? reflect_index(i, n)
                                       : clamp_index(i, n);
}

namespace {

void check_tiling(int width, int height, int side) {
  if (side < kMinPatchSide) {
    throw Error(ErrorCode::kInvalidArgument,
                "patch side must be >= " + std::to_string(kMinPatchSide));
  }
  if (static_cast<long>(side) > 4L * std::min(width, height)) {
    throw Error(ErrorCode::kPatchTooLarge,
                "patch side " + std::to_string(side) +
                    " exceeds 4x the smaller image dimension");
  }
}

std::vector<double> extract_tile(std::span<const double> plane, int width,
                                 int height, int row0, int col0, int side,
                                 PadPolicy policy) {
  std::vector<double> tile(static_cast<std::size_t>(side) * side);
  for (int r = 0; r < side; ++r) {
    const int sr = border_index(row0 + r, height, policy);
    const double* src = plane.data() + static_cast<std::size_t>(sr) * width;
    double* dst = tile.data() + static_cast<std::size_t>(r) * side;
    for (int c = 0; c < side; ++c) {
      dst[c] = src[border_index(col0 + c, width, policy)];
    }
  }
  return tile;
}

}  // namespace

PatchGrid tile_patches(const Image& image, int side, PadPolicy policy) {
  check_tiling(image.width(), image.height(), side);
  PatchGrid grid;
  grid.side = side;
  grid.image_width = image.width();
  grid.image_height = image.height();
  grid.pad_policy = policy;
  grid.rows = (image.height() + side - 1) / side;
  grid.cols = (image.width() + side - 1) / side;
  grid.patches.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int gr = 0; gr < grid.rows; ++gr) {
    for (int gc = 0; gc < grid.cols; ++gc) {
      const PatchOrigin origin{gr * side, gc * side};
      grid.patches.push_back(Patch{
          side, origin,
          extract_tile(image.pixels(), image.width(), image.height(),
                       origin.row, origin.col, side, policy)});
    }
  }
  return grid;
}

std::vector<std::vector<double>> tile_plane(std::span<const double> plane,
                                            int width, int height, int side,
                                            PadPolicy policy) {
  check_tiling(width, height, side);
  if (plane.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kShapeMismatch, "plane size != width * height");
  }
  const int rows = (height + side - 1) / side;
  const int cols = (width + side - 1) / side;
  std::vector<std::vector<double>> tiles;
  tiles.reserve(static_cast<std::size_t>(rows) * cols);
  for (int gr = 0; gr < rows; ++gr) {
    for (int gc = 0; gc < cols; ++gc) {
      tiles.push_back(
          extract_tile(plane, width, height, gr * side, gc * side, side,
                       policy));
    }
  }
  return tiles;
}

Image stitch(const PatchGrid& grid) {
  Image out(grid.image_width, grid.image_height);
  for (const Patch& p : grid.patches) {
    const int rmax = std::min(grid.side, grid.image_height - p.origin.row);
    const int cmax = std::min(grid.side, grid.image_width - p.origin.col);
    for (int r = 0; r < rmax; ++r) {
      for (int c = 0; c < cmax; ++c) {
        out.at(p.origin.row + r, p.origin.col + c) = p.at(r, c);
      }
    }
  }
  return out;
}

Image normalize_minmax(std::span<const double> values, int width, int height,
                       Normalization* used) {
  if (values.size() != static_cast<std::size_t>(width) * height ||
      values.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "plane size != width * height");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (used != nullptr) *used = Normalization{lo, hi};
  std::vector<double> out(values.size(), 0.0);
  if (hi > lo) {
    const double scale = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = std::clamp((values[i] - lo) * scale, 0.0, 1.0);
    }
  }
  return Image(width, height, std::move(out));
}

}  // namespace fsband
