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

#include "fsband/metric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fsband/error.hpp"
#include "fsband/parallel.hpp"

namespace fsband {

BandingMap banding_map(const PatchGrid& grid, std::span<const int> labels,
                       std::span<const HFMap> hfms,
                       std::span<const double> weights) {
  const std::size_t m = grid.size();
  if (labels.size() != m || hfms.size() != m || weights.size() != m) {
    throw Error(ErrorCode::kLengthMismatch,
                "labels, HFMs and weights must all have one entry per patch");
  }
  BandingMap bm;
  bm.width = grid.image_width;
  bm.height = grid.image_height;
  bm.side = grid.side;
  bm.rows = grid.rows;
  bm.cols = grid.cols;
  bm.data.assign(static_cast<std::size_t>(bm.width) * bm.height, 0.0);
  bm.patches.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Patch& p = grid.patches[k];
    if (hfms[k].side != grid.side) {
      throw Error(ErrorCode::kShapeMismatch, "HFM side differs from grid side");
    }
    const int label = labels[k] != 0 ? 1 : 0;
    bm.patches[k] = PatchProvenance{.k = static_cast<int>(k), .label = label, .weight = weights[k]};
    if (label == 0) continue;
    const double scale = weights[k];
    const int rmax = std::min(grid.side, bm.height - p.origin.row);
    const int cmax = std::min(grid.side, bm.width - p.origin.col);
    for (int r = 0; r < rmax; ++r) {
      const double* src = hfms[k].data.data() + static_cast<std::size_t>(r) * grid.side;
      double* dst = bm.data.data() +
                    static_cast<std::size_t>(p.origin.row + r) * bm.width + p.origin.col;
      for (int c = 0; c < cmax; ++c) dst[c] = scale * std::abs(src[c]);
    }
  }
  return bm;
}

const char* to_string(PoolingMode mode) {
  return mode == PoolingMode::kPerPatch ? "per-patch" : "global";
}

PoolingMode parse_pooling_mode(const std::string& name) {
  if (name == "per-patch") return PoolingMode::kPerPatch;
  if (name == "global") return PoolingMode::kGlobal;
  throw Error(ErrorCode::kInvalidArgument, "unknown pooling mode '" + name + "'");
}

std::size_t pooled_count(std::size_t nonzero, double pool_fraction) {
  if (nonzero == 0) return 0;
  const double exact = static_cast<double>(nonzero) * pool_fraction / 100.0;
  const auto n = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(n, 1, nonzero);
}

namespace {

struct Entry {
  double value;
  std::size_t index;  // pixel index in the map
  std::size_t patch;
};

// Descending by value, ties by ascending pixel index.
void sort_worst_first(std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
  });
}

}  // namespace

QualityResult quality_score(const BandingMap& bm, double pool_fraction,
                            PoolingMode mode) {
  if (bm.data.empty() || bm.width < 1 || bm.height < 1) {
    throw Error(ErrorCode::kEmptyMap, "banding map is empty");
  }
  if (!(pool_fraction > 0.0 && pool_fraction <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pool fraction must be in (0, 100]");
  }
  const int side = bm.side > 0 ? bm.side : std::max(bm.width, bm.height);
  const int rows = bm.rows > 0 ? bm.rows : 1;
  const int cols = bm.cols > 0 ? bm.cols : 1;
  const std::size_t m = static_cast<std::size_t>(rows) * cols;

  QualityResult res;
  res.m_patches = static_cast<int>(m);
  res.pool_fraction = pool_fraction;
  res.mode = mode;
  res.patch_sums.assign(m, 0.0);
  res.patch_counts.assign(m, 0);

  std::vector<Entry> global;
  std::vector<Entry> local;
  for (int gr = 0; gr < rows; ++gr) {
    for (int gc = 0; gc < cols; ++gc) {
      const std::size_t k = static_cast<std::size_t>(gr) * cols + gc;
      local.clear();
      const int r0 = gr * side;
      const int c0 = gc * side;
      const int r1 = std::min(bm.height, r0 + side);
      const int c1 = std::min(bm.width, c0 + side);
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          const std::size_t i = static_cast<std::size_t>(r) * bm.width + c;
          if (bm.data[i] != 0.0) local.push_back(Entry{bm.data[i], i, k});
        }
      }
      if (mode == PoolingMode::kGlobal) {
        global.insert(global.end(), local.begin(), local.end());
        continue;
      }
      if (local.empty()) continue;
      sort_worst_first(local);
      const std::size_t take = pooled_count(local.size(), pool_fraction);
      double sum = 0.0;
      for (std::size_t j = 0; j < take; ++j) sum += local[j].value;
      res.patch_sums[k] = sum;
      res.patch_counts[k] = take;
    }
  }

  if (mode == PoolingMode::kPerPatch) {
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (res.patch_counts[k] > 0) {
        total += res.patch_sums[k] / static_cast<double>(res.patch_counts[k]);
      }
    }
    res.q = total / static_cast<double>(m);
    return res;
  }

  if (global.empty()) return res;
  sort_worst_first(global);
  const std::size_t take = pooled_count(global.size(), pool_fraction);
  double sum = 0.0;
  for (std::size_t j = 0; j < take; ++j) {
    sum += global[j].value;
    res.patch_sums[global[j].patch] += global[j].value;
    ++res.patch_counts[global[j].patch];
  }
  res.q = sum / static_cast<double>(take) / static_cast<double>(m);
  return res;
}

const char* to_string(FreqScope scope) {
  return scope == FreqScope::kPatch ? "patch" : "image";
}

FreqScope parse_freq_scope(const std::string& name) {
  if (name == "patch") return FreqScope::kPatch;
  if (name == "image") return FreqScope::kImage;
  throw Error(ErrorCode::kInvalidArgument, "unknown frequency scope '" + name + "'");
}

void DetectConfig::validate() const {
  if (patch_side < kMinPatchSide) {
    throw Error(ErrorCode::kInvalidArgument, "patch side must be >= 8");
  }
  lfm.validate();
  MaskingParams{gamma, patch_side}.validate();
  if (!(pool_fraction > 0.0 && pool_fraction <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pool fraction must be in (0, 100]");
  }
  if (!(label_threshold >= 0.0 && label_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "label threshold must be in [0,1]");
  }
}

Detection detect(const Image& image, const Model& model,
                 const DetectConfig& cfg) {
  cfg.validate();
  if (model.config.input_side != cfg.patch_side) {
    throw Error(ErrorCode::kShapeMismatch,
                "model expects " + std::to_string(model.config.input_side) +
                    "px patches, pipeline uses " + std::to_string(cfg.patch_side));
  }
  const PatchGrid grid = tile_patches(image, cfg.patch_side, cfg.pad_policy);
  const std::size_t m = grid.size();
  std::vector<HFMap> hfms(m);
  std::vector<LFMap> lfms(m);

  if (cfg.freq_scope == FreqScope::kImage) {
    const std::vector<double> h =
        sobel_magnitude(image.pixels(), image.width(), image.height());
    const LfmResult l = lfm_plane(image.pixels(), image.width(), image.height(), cfg.lfm);
    auto h_tiles = tile_plane(h, image.width(), image.height(), cfg.patch_side, cfg.pad_policy);
    auto l_tiles = tile_plane(l.smooth, image.width(), image.height(), cfg.patch_side, cfg.pad_policy);
    auto e_tiles = tile_plane(l.edge_field, image.width(), image.height(), cfg.patch_side, cfg.pad_policy);
    for (std::size_t k = 0; k < m; ++k) {
      hfms[k] = HFMap{cfg.patch_side, std::move(h_tiles[k])};
      lfms[k] = LFMap{cfg.patch_side, std::move(l_tiles[k]), std::move(e_tiles[k])};
    }
  }

  std::vector<double> probs(m);
  std::vector<SpatialFreqStats> stats(m);
  parallel_for(m, cfg.jobs, [&](std::size_t k) {
    const Patch& p = grid.patches[k];
    if (cfg.freq_scope == FreqScope::kPatch) {
      hfms[k] = hfm(p);
      lfms[k] = lfm(p, cfg.lfm);
    }
    probs[k] = forward(model, hfms[k], lfms[k]);
    stats[k] = spatial_freq(p);
  });

  const double eps = threshold_eps(stats);
  const MaskingParams masking{cfg.gamma, cfg.patch_side};
  std::vector<int> labels(m);
  std::vector<double> weights(m);
  for (std::size_t k = 0; k < m; ++k) {
    labels[k] = probs[k] >= cfg.label_threshold ? 1 : 0;
    weights[k] = weight(stats[k].sf, eps, masking);
  }

  Detection det;
  det.map = banding_map(grid, labels, hfms, weights);
  for (std::size_t k = 0; k < m; ++k) {
    det.map.patches[k].cf = stats[k].cf;
    det.map.patches[k].rf = stats[k].rf;
    det.map.patches[k].sf = stats[k].sf;
    det.map.patches[k].probability = probs[k];
  }
  det.quality = quality_score(det.map, cfg.pool_fraction, cfg.pooling);
  det.eps = eps;
  return det;
}

}  // namespace fsband
