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

#include "fsband/error.hpp"
#include "fsband/eval.hpp"
#include "fsband/metric.hpp"
#include "fsband/rng.hpp"
#include "fsband/synth.hpp"

namespace fsband {
namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (double& x : v) x = rng.uniform();
  return Image(w, h, std::move(v));
}

struct Fixture {
  PatchGrid grid;
  std::vector<HFMap> hfms;
};

Fixture make_fixture(int w, int h, int side, std::uint64_t seed) {
  Fixture f;
  f.grid = tile_patches(random_image(w, h, seed), side);
  for (const Patch& p : f.grid.patches) f.hfms.push_back(hfm(p));
  return f;
}

BandingMap single_patch_map(std::vector<double> values, int side) {
  BandingMap bm;
  bm.width = side;
  bm.height = side;
  bm.side = side;
  bm.rows = 1;
  bm.cols = 1;
  bm.data = std::move(values);
  bm.data.resize(static_cast<std::size_t>(side) * side, 0.0);
  return bm;
}

// Model whose output is a fixed probability for every input.
Model constant_model(int side, float logit) {
  NetConfig cfg;
  cfg.branch_channels = {2, 2};
  cfg.early_tap_channels = 2;
  cfg.input_side = side;
  Model m = init_model(cfg);
  m.head.fc2_bias[0] = logit;
  return m;
}

TEST(BandingMap, AllNegativeIsZero) {
  const Fixture f = make_fixture(40, 24, 16, 1);
  const std::vector<int> labels(f.grid.size(), 0);
  const std::vector<double> weights(f.grid.size(), 1.3);
  const BandingMap bm = banding_map(f.grid, labels, f.hfms, weights);
  EXPECT_EQ(bm.width, 40);
  EXPECT_EQ(bm.height, 24);
  for (double x : bm.data) EXPECT_EQ(x, 0.0);
}

TEST(BandingMap, UnitWeightCopiesHfm) {
  const Fixture f = make_fixture(32, 32, 16, 2);
  std::vector<int> labels(4, 0);
  labels[2] = 1;
  const BandingMap bm = banding_map(f.grid, labels, f.hfms, std::vector<double>(4, 1.0));
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const double v = bm.data[r * 32 + c];
      if (r >= 16 && c < 16) {
        EXPECT_EQ(v, f.hfms[2].data[(r - 16) * 16 + c]);
      } else {
        EXPECT_EQ(v, 0.0);
      }
    }
  }
  EXPECT_EQ(bm.patches[2].label, 1);
  EXPECT_EQ(bm.patches[1].label, 0);
}

TEST(BandingMap, LinearInWeight) {
  const Fixture f = make_fixture(48, 32, 16, 3);
  const std::vector<int> labels(f.grid.size(), 1);
  std::vector<double> w(f.grid.size(), 1.0);
  const BandingMap a = banding_map(f.grid, labels, f.hfms, w);
  w[4] = 2.0;
  const BandingMap b = banding_map(f.grid, labels, f.hfms, w);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 48; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * 48 + c;
      const bool in4 = r >= 16 && c >= 16 && c < 32;
      EXPECT_EQ(b.data[i], in4 ? 2.0 * a.data[i] : a.data[i]);
    }
  }
}

TEST(BandingMap, PaddingDroppedAndZeroPropagates) {
  const Image img = random_image(20, 20, 4);
  const PatchGrid g = tile_patches(img, 16);
  std::vector<HFMap> h;
  for (const Patch& p : g.patches) h.push_back(hfm(p));
  h[0].data.assign(h[0].data.size(), 0.0);
  const BandingMap bm = banding_map(g, std::vector<int>(4, 1), h, std::vector<double>(4, 1.5));
  ASSERT_EQ(bm.data.size(), 400u);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) EXPECT_EQ(bm.data[r * 20 + c], 0.0);
  }
  EXPECT_EQ(bm.data[19 * 20 + 19], 1.5 * h[3].data[3 * 16 + 3]);
}

TEST(BandingMap, Errors) {
  const Fixture f = make_fixture(32, 32, 16, 5);
  try {
    banding_map(f.grid, std::vector<int>(3, 1), f.hfms, std::vector<double>(4, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(PooledCount, CeilWithFloorOfOne) {
  EXPECT_EQ(pooled_count(0, 80), 0u);
  EXPECT_EQ(pooled_count(4, 50), 2u);
  EXPECT_EQ(pooled_count(5, 80), 4u);
  EXPECT_EQ(pooled_count(3, 50), 2u);
  EXPECT_EQ(pooled_count(1, 1), 1u);
  EXPECT_EQ(pooled_count(10, 100), 10u);
}

TEST(QualityScore, HandEnumeratedSelection) {
  std::vector<double> v{4.0, 0.0, 3.0, 2.0, 0.0, 1.0};
  const QualityResult q = quality_score(single_patch_map(v, 8), 50.0);
  EXPECT_DOUBLE_EQ(q.q, 3.5);
  EXPECT_EQ(q.m_patches, 1);
  EXPECT_EQ(q.patch_counts[0], 2u);
  EXPECT_DOUBLE_EQ(q.patch_sums[0], 7.0);
}

TEST(QualityScore, ZeroMapAndErrors) {
  EXPECT_EQ(quality_score(single_patch_map({}, 8)).q, 0.0);
  EXPECT_THROW(quality_score(single_patch_map({1.0}, 8), 0.0), Error);
  EXPECT_THROW(quality_score(single_patch_map({1.0}, 8), 101.0), Error);
  try {
    quality_score(BandingMap{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMap);
  }
}

TEST(QualityScore, PerPatchMeanOfMeans) {
  const Fixture f = make_fixture(32, 16, 16, 6);
  const BandingMap bm = banding_map(f.grid, std::vector<int>{1, 0}, f.hfms,
                                    std::vector<double>{1.0, 1.0});
  std::vector<double> nz;
  for (double x : f.hfms[0].data) {
    if (x != 0.0) nz.push_back(x);
  }
  std::sort(nz.rbegin(), nz.rend());
  const std::size_t take = static_cast<std::size_t>(std::ceil(nz.size() * 0.8 - 1e-9));
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += nz[i];
  const QualityResult q = quality_score(bm, 80.0);
  EXPECT_NEAR(q.q, sum / take / 2.0, 1e-12);
  EXPECT_EQ(q.patch_counts[1], 0u);
}

TEST(QualityScore, GlobalMode) {
  BandingMap bm;
  bm.width = 16;
  bm.height = 8;
  bm.side = 8;
  bm.rows = 1;
  bm.cols = 2;
  bm.data.assign(128, 0.0);
  bm.data[0] = 4.0;
  bm.data[1] = 2.0;
  bm.data[8] = 3.0;
  bm.data[9] = 1.0;
  const QualityResult q = quality_score(bm, 50.0, PoolingMode::kGlobal);
  // Top two of {4,3,2,1} over the map, divided by M = 2.
  EXPECT_DOUBLE_EQ(q.q, 3.5 / 2.0);
  EXPECT_EQ(q.patch_counts[0], 1u);
  EXPECT_EQ(q.patch_counts[1], 1u);
  const QualityResult per = quality_score(bm, 50.0, PoolingMode::kPerPatch);
  EXPECT_DOUBLE_EQ(per.q, (4.0 + 3.0) / 2.0);
}

TEST(QualityScore, HomogeneousAndMonotone) {
  const Fixture f = make_fixture(48, 48, 16, 7);
  std::vector<int> labels(9, 0);
  labels[0] = labels[4] = 1;
  const std::vector<double> w(9, 1.2);
  BandingMap bm = banding_map(f.grid, labels, f.hfms, w);
  const double q = quality_score(bm).q;
  BandingMap scaled = bm;
  for (double& x : scaled.data) x *= 3.0;
  EXPECT_NEAR(quality_score(scaled).q, 3.0 * q, 1e-12);

  double prev = q;
  for (int k : {1, 2, 3, 5, 8}) {
    labels[k] = 1;
    const double next = quality_score(banding_map(f.grid, labels, f.hfms, w)).q;
    EXPECT_GE(next, prev);
    prev = next;
  }
}

TEST(QualityScore, TieBreakIsDeterministic) {
  std::vector<double> v(64, 0.0);
  for (int i = 0; i < 10; ++i) v[i * 3] = 1.0;
  const QualityResult a = quality_score(single_patch_map(v, 8), 35.0);
  EXPECT_EQ(a.patch_counts[0], 4u);
  EXPECT_DOUBLE_EQ(a.q, 1.0);
}

TEST(Parsers, NamesRoundTrip) {
  for (PoolingMode m : {PoolingMode::kPerPatch, PoolingMode::kGlobal}) {
    EXPECT_EQ(parse_pooling_mode(to_string(m)), m);
  }
  for (FreqScope s : {FreqScope::kPatch, FreqScope::kImage}) {
    EXPECT_EQ(parse_freq_scope(to_string(s)), s);
  }
  EXPECT_THROW(parse_pooling_mode("mean"), Error);
}

TEST(Detect, ConstantImageScoresZero) {
  const Model m = constant_model(16, 5.0f);
  const Detection d = detect(Image(40, 30, 0.5), m, DetectConfig{.patch_side = 16});
  EXPECT_EQ(d.quality.q, 0.0);
  EXPECT_EQ(d.map.patches.size(), 6u);
  for (const auto& p : d.map.patches) EXPECT_EQ(p.label, 1);
}

TEST(Detect, LabelsFollowThreshold) {
  const Image img = random_image(32, 32, 8);
  const Detection pos = detect(img, constant_model(16, 2.0f), DetectConfig{.patch_side = 16});
  const Detection neg = detect(img, constant_model(16, -2.0f), DetectConfig{.patch_side = 16});
  EXPECT_GT(pos.quality.q, 0.0);
  EXPECT_EQ(neg.quality.q, 0.0);
  for (const auto& p : pos.map.patches) {
    EXPECT_NEAR(p.probability, 1.0 / (1.0 + std::exp(-2.0)), 1e-6);
    EXPECT_GE(p.weight, 1.0);
  }
}

TEST(Detect, DeterministicAcrossJobCounts) {
  const Image img = random_image(70, 50, 9);
  const Model m = constant_model(16, 1.0f);
  DetectConfig cfg{.patch_side = 16};
  const Detection a = detect(img, m, cfg);
  cfg.jobs = 4;
  const Detection b = detect(img, m, cfg);
  EXPECT_EQ(a.map, b.map);
  EXPECT_EQ(a.quality.q, b.quality.q);
}

TEST(Detect, ImageScopeRuns) {
  const Image img = random_image(48, 40, 10);
  DetectConfig cfg{.patch_side = 16};
  cfg.freq_scope = FreqScope::kImage;
  const Detection d = detect(img, constant_model(16, 1.0f), cfg);
  EXPECT_GT(d.quality.q, 0.0);
  EXPECT_EQ(d.map.patches.size(), 9u);
}

TEST(Detect, PatchSideMismatch) {
  try {
    detect(Image(64, 64, 0.2), constant_model(16, 1.0f), DetectConfig{.patch_side = 32});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Detect, BandedScoresAboveDitheredSource) {
  SynthConfig sc;
  sc.count_per_class = 150;
  sc.side = 32;
  sc.bits = {3};
  const Corpus c = gen_dataset(sc);
  NetConfig net;
  net.branch_channels = {8, 16};
  net.early_tap_channels = 8;
  net.input_side = 32;
  const FrequencyBank bank = build_bank(c.patches, c.labels());
  TrainConfig tc;
  tc.epochs = 4;
  const Model m = train(init_model(net), variant_samples(bank, Variant::kFsBand), tc).first;

  int wins = 0;
  const int n = 10;
  for (int i = 0; i < n; ++i) {
    const Image src = gen_background_image(BackgroundKind::kLinearGradient, 96, 96, 1000 + i);
    const Image banded = apply_banding(src, 3);
    const Image clean(96, 96, dither_to_8bit(src.pixels(), 77 + i));
    const double qb = detect(banded, m, DetectConfig{.patch_side = 32}).quality.q;
    const double qc = detect(clean, m, DetectConfig{.patch_side = 32}).quality.q;
    if (qb > qc) ++wins;
  }
  EXPECT_GE(wins, 9);
}

}  // namespace
}  // namespace fsband
