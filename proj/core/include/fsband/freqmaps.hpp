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

// High-frequency (gradient magnitude) and low-frequency (edge-preserving
// piecewise-smooth approximation) maps of a patch.

#ifndef FSBAND_FREQMAPS_HPP_
#define FSBAND_FREQMAPS_HPP_

#include <filesystem>
#include <span>
#include <vector>

#include "fsband/image.hpp"

namespace fsband {

// Isotropic Sobel kernel, horizontal derivative. The vertical kernel is its
// transpose.
inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kSobelX[3][3] = {
    {-1.0, 0.0, 1.0}, {-kSqrt2, 0.0, kSqrt2}, {-1.0, 0.0, 1.0}};

struct HFMap {
  int side = 0;
  std::vector<double> data;  // nonnegative gradient magnitudes
  friend bool operator==(const HFMap&, const HFMap&) = default;
};

struct LFMap {
  int side = 0;
  std::vector<double> data;        // smoothed luma
  std::vector<double> edge_field;  // phase-field edge indicator in [0,1]
  friend bool operator==(const LFMap&, const LFMap&) = default;
};

struct LfmConfig {
  double alpha = 2.0;        // smoothness weight
  double beta = 0.02;        // edge-length weight
  int iterations = 60;       // outer alternations
  double tol = 1e-4;         // stop when max |change| of both fields < tol
  double edge_width = 1.0;   // phase-field width in pixels

  void validate() const;
};

// Gradient magnitude with reflect borders; output shape equals input shape.
std::vector<double> sobel_magnitude(std::span<const double> plane, int width,
                                    int height);
HFMap hfm(const Patch& patch);

struct LfmResult {
  std::vector<double> smooth;
  std::vector<double> edge_field;
  std::vector<double> energy_trace;  // [0] is the energy at initialization
  int iterations_run = 0;
};

// Alternating minimization of the phase-field relaxation
//
//   E(L, v) = 1/2 sum (I - L)^2 + alpha sum (1 - v)^2 |grad L|^2
//           + beta sum (eps |grad v|^2 + v^2 / (4 eps))
//
// with forward differences and Neumann borders. Each Gauss-Seidel update is
// the exact minimizer along its coordinate, so E never increases. Starts
// from L = I, v = 0. Throws kNonFiniteInput on NaN/Inf input. The energy
// trace is only filled when `record_energy` is set.
LfmResult lfm_plane(std::span<const double> plane, int width, int height,
                    const LfmConfig& cfg, bool record_energy = false);
LFMap lfm(const Patch& patch, const LfmConfig& cfg = {},
          std::vector<double>* energy_trace = nullptr);

double lfm_energy_plane(std::span<const double> image,
                        std::span<const double> smooth,
                        std::span<const double> edge_field, int width,
                        int height, const LfmConfig& cfg);
// Throws kShapeMismatch when the map does not match the patch.
double lfm_energy(const Patch& patch, const LFMap& map, const LfmConfig& cfg);

// Anisotropic total variation: sum of absolute forward differences.
double total_variation(std::span<const double> plane, int width, int height);

// Writes `<stem>.png` (min-max normalized 8-bit) and `<stem>.txt` carrying
// the normalization range.
void dump_map_png(const std::filesystem::path& stem,
                  std::span<const double> values, int width, int height);

}  // namespace fsband

#endif  // FSBAND_FREQMAPS_HPP_
