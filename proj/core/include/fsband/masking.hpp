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

// Spatial-frequency activity of a patch and the visibility weight derived
// from it.

#ifndef FSBAND_MASKING_HPP_
#define FSBAND_MASKING_HPP_

#include <span>

#include "fsband/image.hpp"

namespace fsband {

struct SpatialFreqStats {
  double cf = 0.0;  // RMS of differences along the column index
  double rf = 0.0;  // RMS of differences along the row index
  double sf = 0.0;  // sqrt(cf^2 + rf^2)
};

struct MaskingParams {
  double gamma = 1.5;
  int side = kDefaultPatchSide;

  void validate() const;
};

// Both sums are normalized by side^2 (not by the number of differences).
SpatialFreqStats spatial_freq(std::span<const double> values, int side);
SpatialFreqStats spatial_freq(const Patch& patch);

// Mean sf over every patch of one image. Throws kEmptyInput.
double threshold_eps(std::span<const SpatialFreqStats> stats);

// 1 when sf <= eps, else 1 + (sf - eps)^gamma / side.
double weight(double sf, double eps, const MaskingParams& params);

}  // namespace fsband

#endif  // FSBAND_MASKING_HPP_
