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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "fsband/error.hpp"
#include "fsband/freqmaps.hpp"
#include "fsband/rng.hpp"
#include "fsband/synth.hpp"
#include "oracles.hpp"

namespace fsband {
namespace {

constexpr double kStep = 2.0 + 1.4142135623730951;

Patch noise_patch(int side, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(side) * side);
  for (double& x : v) x = rng.uniform(lo, hi);
  return make_patch(side, std::move(v));
}

Patch vertical_step(int side, int last_dark_col, double lo = 0.0, double hi = 1.0) {
  std::vector<double> v(static_cast<std::size_t>(side) * side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) v[r * side + c] = c <= last_dark_col ? lo : hi;
  }
  return make_patch(side, std::move(v));
}

Patch transpose(const Patch& p) {
  Patch t = p;
  for (int r = 0; r < p.side; ++r) {
    for (int c = 0; c < p.side; ++c) t.at(r, c) = p.at(c, r);
  }
  return t;
}

double variance(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / v.size();
}

TEST(Hfm, ConstantIsZero) {
  const HFMap h = hfm(make_patch(16, std::vector<double>(256, 0.5)));
  for (double x : h.data) EXPECT_EQ(x, 0.0);
}

TEST(Hfm, StepEdgeHandValue) {
  const HFMap h = hfm(vertical_step(8, 3));
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const double expected = (c == 3 || c == 4) ? kStep : 0.0;
      EXPECT_NEAR(h.data[r * 8 + c], expected, 1e-12) << r << "," << c;
    }
  }
}

TEST(Hfm, HorizontalStepBySymmetry) {
  const Patch v = vertical_step(8, 3);
  const HFMap hv = hfm(v);
  const HFMap hh = hfm(transpose(v));
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) EXPECT_NEAR(hh.data[r * 8 + c], hv.data[c * 8 + r], 1e-12);
  }
}

TEST(Hfm, MatchesDirectCorrelation) {
  double ky[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ky[i][j] = kSobelX[j][i];
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Patch p = noise_patch(16, seed);
    const auto gx = testing::correlate3x3(p.data, 16, 16, kSobelX);
    const auto gy = testing::correlate3x3(p.data, 16, 16, ky);
    const HFMap h = hfm(p);
    for (std::size_t i = 0; i < h.data.size(); ++i) {
      EXPECT_NEAR(h.data[i], std::hypot(gx[i], gy[i]), 1e-12);
    }
  }
}

TEST(Hfm, KernelConstants) {
  EXPECT_EQ(kSobelX[1][0], -std::sqrt(2.0));
  EXPECT_EQ(kSobelX[1][2], std::sqrt(2.0));
  EXPECT_EQ(kSobelX[0][0], -1.0);
  EXPECT_EQ(kSobelX[2][2], 1.0);
  EXPECT_EQ(kSobelX[1][1], 0.0);
}

TEST(Hfm, ContrastEquivariant) {
  const Patch p = noise_patch(16, 9, 0.0, 0.4);
  Patch q = p;
  for (double& x : q.data) x *= 2.5;
  const HFMap a = hfm(p);
  const HFMap b = hfm(q);
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(b.data[i], 2.5 * a.data[i], 1e-12);
}

TEST(Hfm, TranslationEquivariantAwayFromBorders) {
  const HFMap a = hfm(vertical_step(32, 10));
  const HFMap b = hfm(vertical_step(32, 14));
  for (int r = 2; r < 30; ++r) {
    for (int c = 2; c < 26; ++c) EXPECT_EQ(a.data[r * 32 + c], b.data[r * 32 + c + 4]);
  }
}

TEST(Lfm, ConstantIsFixedPoint) {
  const Patch p = make_patch(16, std::vector<double>(256, 0.42));
  const LFMap m = lfm(p);
  for (double v : m.data) EXPECT_NEAR(v, 0.42, 1e-14);
  for (double v : m.edge_field) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Lfm, NoiseVarianceShrinks) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Patch p = noise_patch(32, seed);
    EXPECT_LT(variance(lfm(p).data), variance(p.data));
  }
}

TEST(Lfm, StepEdgePreserved) {
  LfmConfig cfg;
  cfg.beta = 0.005;
  const Patch p = vertical_step(16, 7, 0.1, 0.9);
  const LFMap m = lfm(p, cfg);
  // Forward differences put the jump at the dark side of the step.
  for (int r = 0; r < 16; ++r) {
    const auto row = m.edge_field.begin() + r * 16;
    EXPECT_EQ(std::max_element(row, row + 16) - row, 7);
  }
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      const double expected = c <= 7 ? 0.1 : 0.9;
      EXPECT_NEAR(m.data[r * 16 + c], expected, 0.05);
    }
  }
}

TEST(Lfm, RangeAndEdgeFieldBounds) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const Patch p = noise_patch(16, seed, 0.2, 0.7);
    const LFMap m = lfm(p);
    const auto [mn, mx] = std::minmax_element(p.data.begin(), p.data.end());
    for (double x : m.data) {
      EXPECT_GE(x, *mn - 1e-6);
      EXPECT_LE(x, *mx + 1e-6);
    }
    for (double v : m.edge_field) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Lfm, RejectsNonFinite) {
  Patch p{8, {}, std::vector<double>(64, 0.5)};
  p.data[9] = NAN;
  try {
    lfm(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteInput);
  }
}

TEST(Lfm, ConfigValidation) {
  for (auto mutate : std::vector<std::function<void(LfmConfig&)>>{
           [](LfmConfig& c) { c.alpha = 0; }, [](LfmConfig& c) { c.beta = -1; },
           [](LfmConfig& c) { c.iterations = 0; }, [](LfmConfig& c) { c.tol = 0; }}) {
    LfmConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.validate(), Error);
  }
}

TEST(LfmEnergy, ClosedForms) {
  const LfmConfig cfg;
  const Patch flat = make_patch(8, std::vector<double>(64, 0.3));
  EXPECT_EQ(lfm_energy(flat, LFMap{8, flat.data, std::vector<double>(64, 0.0)}, cfg), 0.0);

  const Patch p = noise_patch(8, 4);
  double grad = 0.0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (c + 1 < 8) grad += std::pow(p.at(r, c + 1) - p.at(r, c), 2);
      if (r + 1 < 8) grad += std::pow(p.at(r + 1, c) - p.at(r, c), 2);
    }
  }
  const double e = lfm_energy(p, LFMap{8, p.data, std::vector<double>(64, 0.0)}, cfg);
  EXPECT_NEAR(e, cfg.alpha * grad, 1e-12);

  EXPECT_THROW(lfm_energy(p, LFMap{16, {}, {}}, cfg), Error);
}

TEST(LfmEnergy, SolverDescends) {
  const LfmConfig cfg;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Patch p = seed % 2 == 0 ? noise_patch(16, seed)
                                  : apply_banding(gen_background(BackgroundKind::kLinearGradient, 16, seed), 3);
    std::vector<double> trace;
    const LFMap m = lfm(p, cfg, &trace);
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-9);
    EXPECT_NEAR(trace.back(), lfm_energy(p, m, cfg), 1e-9 * std::max(1.0, trace.back()));
    const double start = lfm_energy(p, LFMap{16, p.data, std::vector<double>(256, 0.0)}, cfg);
    EXPECT_LE(lfm_energy(p, m, cfg), start + 1e-9);
    EXPECT_LE(total_variation(m.data, 16, 16), total_variation(p.data, 16, 16));
  }
}

TEST(TotalVariation, Anisotropic) {
  const std::vector<double> v{0.0, 1.0, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(total_variation(v, 2, 2), 1.0 + 0.5 + 0.0 + 0.5);
}

TEST(DumpMap, WritesImageAndRange) {
  testing::TempDir dir("dump");
  dump_map_png(dir / "m", std::vector<double>{1.0, 3.0, 2.0, 5.0}, 2, 2);
  EXPECT_TRUE(std::filesystem::exists(dir / "m.png"));
  std::ifstream in(dir / "m.txt");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find('1'), std::string::npos);
  EXPECT_NE(text.find('5'), std::string::npos);
  const Image img = load_image(dir / "m.png");
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_EQ(img.at(1, 1), 1.0);
}

}  // namespace
}  // namespace fsband
