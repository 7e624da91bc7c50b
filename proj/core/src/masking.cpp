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

#include "fsband/masking.hpp"

#include <cmath>

#include "fsband/error.hpp"

namespace fsband {

void MaskingParams::validate() const {
  if (!(gamma > 0.0) || side < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "masking requires gamma > 0 and side >= 1");
  }
}

SpatialFreqStats spatial_freq(std::span<const double> values, int side) {
  if (values.size() != static_cast<std::size_t>(side) * side) {
    throw Error(ErrorCode::kShapeMismatch, "patch data length != side^2");
  }
  double col_sum = 0.0;
  double row_sum = 0.0;
  for (int r = 0; r < side; ++r) {
    const double* row = values.data() + static_cast<std::size_t>(r) * side;
    for (int c = 1; c < side; ++c) {
      const double d = row[c] - row[c - 1];
      col_sum += d * d;
    }
    if (r > 0) {
      const double* prev = row - side;
      for (int c = 0; c < side; ++c) {
        const double d = row[c] - prev[c];
        row_sum += d * d;
      }
    }
  }
  const double norm = 1.0 / (static_cast<double>(side) * side);
  SpatialFreqStats s;
  s.cf = std::sqrt(col_sum * norm);
  s.rf = std::sqrt(row_sum * norm);
  s.sf = std::sqrt(s.cf * s.cf + s.rf * s.rf);
  return s;
}

SpatialFreqStats spatial_freq(const Patch& patch) {
  return spatial_freq(patch.data, patch.side);
}

double threshold_eps(std::span<const SpatialFreqStats> stats) {
  if (stats.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no patches to average");
  }
  double sum = 0.0;
  for (const auto& s : stats) sum += s.sf;
  return sum / static_cast<double>(stats.size());
}

double weight(double sf, double eps, const MaskingParams& params) {
  // sf is a root of a sum of squares, so |sf| == sf.
  if (sf <= eps) return 1.0;
  return 1.0 + std::pow(sf - eps, params.gamma) / params.side;
}

}  // namespace fsband
