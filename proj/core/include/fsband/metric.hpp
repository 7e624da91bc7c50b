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

// Pixel-wise banding map and worst-percentile pooled quality score; the
// end-to-end detect() entry point.

#ifndef FSBAND_METRIC_HPP_
#define FSBAND_METRIC_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fsband/freqmaps.hpp"
#include "fsband/image.hpp"
#include "fsband/masking.hpp"
#include "fsband/net.hpp"

namespace fsband {

struct PatchProvenance {
  int k = 0;
  int label = 0;
  double weight = 1.0;
  double cf = 0.0;
  double rf = 0.0;
  double sf = 0.0;
  double probability = 0.0;
  friend bool operator==(const PatchProvenance&, const PatchProvenance&) = default;
};

struct BandingMap {
  int width = 0;
  int height = 0;
  int side = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // width x height, >= 0
  std::vector<PatchProvenance> patches;
  friend bool operator==(const BandingMap&, const BandingMap&) = default;
};

// weight * label * |HFM| per pixel, stitched into image coordinates with the
// padding dropped. Throws kLengthMismatch if any list is not M long and
// kShapeMismatch if an HFM side differs from the grid.
BandingMap banding_map(const PatchGrid& grid, std::span<const int> labels,
                       std::span<const HFMap> hfms,
                       std::span<const double> weights);

enum class PoolingMode {
  kPerPatch,  // top p% within each patch, mean of the patch means over M
  kGlobal,    // top p% over the whole map, divided by M
};

const char* to_string(PoolingMode mode);
PoolingMode parse_pooling_mode(const std::string& name);

inline constexpr double kDefaultPoolFraction = 80.0;

struct QualityResult {
  double q = 0.0;
  int m_patches = 0;
  double pool_fraction = kDefaultPoolFraction;
  PoolingMode mode = PoolingMode::kPerPatch;
  // Per-patch sums of the selected values and selection sizes. In global
  // mode these hold the contribution of each patch to the global selection.
  std::vector<double> patch_sums;
  std::vector<std::size_t> patch_counts;
};

// Selection size for n non-zero values: ceil(n * p / 100), at least 1.
std::size_t pooled_count(std::size_t nonzero, double pool_fraction);

// Throws kEmptyMap for a zero-sized map and kInvalidArgument unless
// 0 < pool_fraction <= 100.
QualityResult quality_score(const BandingMap& bm,
                            double pool_fraction = kDefaultPoolFraction,
                            PoolingMode mode = PoolingMode::kPerPatch);

// Whether HFM/LFM are computed per patch or once on the whole image before
// tiling.
enum class FreqScope { kPatch, kImage };

const char* to_string(FreqScope scope);
FreqScope parse_freq_scope(const std::string& name);

struct DetectConfig {
  int patch_side = kDefaultPatchSide;
  PadPolicy pad_policy = PadPolicy::kReflect;
  LfmConfig lfm;
  double gamma = 1.5;
  double pool_fraction = kDefaultPoolFraction;
  PoolingMode pooling = PoolingMode::kPerPatch;
  double label_threshold = 0.5;
  FreqScope freq_scope = FreqScope::kPatch;
  int jobs = 1;

  void validate() const;
};

struct Detection {
  BandingMap map;
  QualityResult quality;
  double eps = 0.0;  // mean spatial frequency over the patches
};

// tile -> HFM/LFM -> classifier (label = p >= threshold) -> spatial
// frequency weights -> banding map -> pooled score.
Detection detect(const Image& image, const Model& model,
                 const DetectConfig& cfg = {});

}  // namespace fsband

#endif  // FSBAND_METRIC_HPP_
