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

#include "fsband/freqmaps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fsband/error.hpp"

namespace fsband {

void LfmConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || iterations < 1 || !(tol > 0.0) ||
      !(edge_width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "LFM config requires alpha, beta, tol, edge_width > 0 and "
                "iterations >= 1");
  }
}

std::vector<double> sobel_magnitude(std::span<const double> plane, int width,
                                    int height) {
  if (plane.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kShapeMismatch, "plane size != width * height");
  }
  // Reflect-padded copy, then paired differences so flat regions give
  // exactly zero.
  const int pw = width + 2;
  std::vector<double> pad(static_cast<std::size_t>(pw) * (height + 2));
  for (int r = -1; r <= height; ++r) {
    const double* src = plane.data() + static_cast<std::size_t>(reflect_index(r, height)) * width;
    double* dst = pad.data() + static_cast<std::size_t>(r + 1) * pw;
    for (int c = -1; c <= width; ++c) dst[c + 1] = src[reflect_index(c, width)];
  }
  std::vector<double> out(plane.size());
  for (int r = 0; r < height; ++r) {
    const double* up = pad.data() + static_cast<std::size_t>(r) * pw;
    const double* mid = up + pw;
    const double* dn = mid + pw;
    double* o = out.data() + static_cast<std::size_t>(r) * width;
    for (int c = 0; c < width; ++c) {
      const double gx = (up[c + 2] - up[c]) + kSqrt2 * (mid[c + 2] - mid[c]) + (dn[c + 2] - dn[c]);
      const double gy = (dn[c] - up[c]) + kSqrt2 * (dn[c + 1] - up[c + 1]) + (dn[c + 2] - up[c + 2]);
      o[c] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

HFMap hfm(const Patch& patch) {
  return HFMap{patch.side, sobel_magnitude(patch.data, patch.side, patch.side)};
}

namespace {

// Squared forward-difference gradient at (r, c); missing neighbours count
// as zero difference.
inline double grad_sq(const double* f, int width, int height, int r, int c) {
  const std::size_t i = static_cast<std::size_t>(r) * width + c;
  double g = 0.0;
  if (c + 1 < width) {
    const double d = f[i + 1] - f[i];
    g += d * d;
  }
  if (r + 1 < height) {
    const double d = f[i + width] - f[i];
    g += d * d;
  }
  return g;
}

void check_finite(std::span<const double> plane) {
  for (double v : plane) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteInput, "input contains NaN or Inf");
    }
  }
}

}  // namespace

double lfm_energy_plane(std::span<const double> image,
                        std::span<const double> smooth,
                        std::span<const double> edge_field, int width,
                        int height, const LfmConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (image.size() != n || smooth.size() != n || edge_field.size() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "image, smooth map and edge field must share a shape");
  }
  const double eps = cfg.edge_width;
  double data = 0.0;
  double smoothness = 0.0;
  double edges = 0.0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      const double d = image[i] - smooth[i];
      data += d * d;
      const double z = 1.0 - edge_field[i];
      smoothness += z * z * grad_sq(smooth.data(), width, height, r, c);
      edges += eps * grad_sq(edge_field.data(), width, height, r, c) +
               edge_field[i] * edge_field[i] / (4.0 * eps);
    }
  }
  return 0.5 * data + cfg.alpha * smoothness + cfg.beta * edges;
}

double lfm_energy(const Patch& patch, const LFMap& map, const LfmConfig& cfg) {
  if (map.side != patch.side) {
    throw Error(ErrorCode::kShapeMismatch, "LFM side differs from patch side");
  }
  return lfm_energy_plane(patch.data, map.data, map.edge_field, patch.side,
                          patch.side, cfg);
}

LfmResult lfm_plane(std::span<const double> plane, int width, int height,
                    const LfmConfig& cfg, bool record_energy) {
  cfg.validate();
  if (plane.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kShapeMismatch, "plane size != width * height");
  }
  check_finite(plane);

  LfmResult res;
  res.smooth.assign(plane.begin(), plane.end());
  res.edge_field.assign(plane.size(), 0.0);
  double* L = res.smooth.data();
  double* v = res.edge_field.data();
  const double* I = plane.data();
  const double alpha = cfg.alpha;
  const double eps = cfg.edge_width;
  const double beta_eps = cfg.beta * eps;
  const double beta_decay = cfg.beta / (4.0 * eps);

  if (record_energy) {
    res.energy_trace.push_back(
        lfm_energy_plane(plane, res.smooth, res.edge_field, width, height, cfg));
  }

  for (int it = 0; it < cfg.iterations; ++it) {
    double max_change = 0.0;

    // Edge field: quadratic in each v_p given L.
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * width + c;
        const double g = alpha * grad_sq(L, width, height, r, c);
        double nsum = 0.0;
        int deg = 0;
        if (c > 0) { nsum += v[i - 1]; ++deg; }
        if (c + 1 < width) { nsum += v[i + 1]; ++deg; }
        if (r > 0) { nsum += v[i - width]; ++deg; }
        if (r + 1 < height) { nsum += v[i + width]; ++deg; }
        const double updated =
            (g + beta_eps * nsum) / (g + beta_eps * deg + beta_decay);
        max_change = std::max(max_change, std::abs(updated - v[i]));
        v[i] = updated;
      }
    }

    // Smooth map: each forward-difference edge carries the weight
    // alpha * (1 - v_origin)^2 of its origin pixel.
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * width + c;
        const double z = 1.0 - v[i];
        const double own = 2.0 * alpha * z * z;
        double num = I[i];
        double den = 1.0;
        if (c + 1 < width) { num += own * L[i + 1]; den += own; }
        if (r + 1 < height) { num += own * L[i + width]; den += own; }
        if (c > 0) {
          const double zl = 1.0 - v[i - 1];
          const double w = 2.0 * alpha * zl * zl;
          num += w * L[i - 1];
          den += w;
        }
        if (r > 0) {
          const double zu = 1.0 - v[i - width];
          const double w = 2.0 * alpha * zu * zu;
          num += w * L[i - width];
          den += w;
        }
        const double updated = num / den;
        max_change = std::max(max_change, std::abs(updated - L[i]));
        L[i] = updated;
      }
    }

    res.iterations_run = it + 1;
    if (record_energy) {
      res.energy_trace.push_back(lfm_energy_plane(plane, res.smooth,
                                                  res.edge_field, width,
                                                  height, cfg));
    }
    if (max_change < cfg.tol) break;
  }
  return res;
}

LFMap lfm(const Patch& patch, const LfmConfig& cfg,
          std::vector<double>* energy_trace) {
  LfmResult res = lfm_plane(patch.data, patch.side, patch.side, cfg,
                            energy_trace != nullptr);
  if (energy_trace != nullptr) *energy_trace = std::move(res.energy_trace);
  return LFMap{patch.side, std::move(res.smooth), std::move(res.edge_field)};
}

double total_variation(std::span<const double> plane, int width, int height) {
  double tv = 0.0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      if (c + 1 < width) tv += std::abs(plane[i + 1] - plane[i]);
      if (r + 1 < height) tv += std::abs(plane[i + width] - plane[i]);
    }
  }
  return tv;
}

void dump_map_png(const std::filesystem::path& stem,
                  std::span<const double> values, int width, int height) {
  Normalization norm;
  const Image img = normalize_minmax(values, width, height, &norm);
  std::filesystem::path png = stem;
  png += ".png";
  save_png(png, img, 8);
  std::filesystem::path txt = stem;
  txt += ".txt";
  std::ofstream side(txt);
  if (!side) throw Error(ErrorCode::kIo, "cannot write file", txt.string());
  side << std::setprecision(17) << "min " << norm.min << "\nmax " << norm.max
       << '\n';
}

}  // namespace fsband
