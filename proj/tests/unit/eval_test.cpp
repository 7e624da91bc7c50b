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
#include <random>
#include <sstream>

#include "json.hpp"

#include "fsband/error.hpp"
#include "fsband/eval.hpp"
#include "oracles.hpp"

namespace fsband {
namespace {

ScoredSet to_set(const testing::RandomScores& r) { return {r.scores, r.labels}; }

TEST(Auroc, HandExamples) {
  EXPECT_DOUBLE_EQ(auroc({{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}}), 1.0);
  EXPECT_DOUBLE_EQ(auroc({{0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(auroc({{0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}}), 0.5);
  // One discordant pair out of four.
  EXPECT_DOUBLE_EQ(auroc({{0.9, 0.4, 0.6, 0.1}, {1, 1, 0, 0}}), 0.75);
}

TEST(Auprc, HandExamples) {
  EXPECT_DOUBLE_EQ(auprc({{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}}), 1.0);
  // Ranking 1,0,1: recall 1/2 at precision 1, then 1/2 more at 2/3.
  EXPECT_NEAR(auprc({{0.9, 0.5, 0.3}, {1, 0, 1}}), 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
  // A single tie group of everything gives the prevalence.
  EXPECT_DOUBLE_EQ(auprc({{0.3, 0.3, 0.3, 0.3}, {1, 0, 0, 0}}), 0.25);
}

TEST(Auroc, MatchesPairwiseOracle) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto r = testing::random_scored(seed, 5 + static_cast<int>(seed * 3 % 150),
                                          2 + static_cast<int>(seed % 12));
    EXPECT_NEAR(auroc(to_set(r)), testing::pairwise_auroc(r.scores, r.labels), 1e-9);
    EXPECT_NEAR(auprc(to_set(r)), testing::enumerated_auprc(r.scores, r.labels), 1e-9);
  }
}

TEST(Auroc, MonotoneTransformInvariance) {
  const auto r = testing::random_scored(11, 120, 15);
  ScoredSet s = to_set(r);
  ScoredSet t = s;
  for (double& x : t.scores) x = std::exp(3.0 * x) - 4.0;
  EXPECT_DOUBLE_EQ(auroc(s), auroc(t));
  EXPECT_DOUBLE_EQ(auprc(s), auprc(t));
}

TEST(Auroc, LabelFlipComplements) {
  const auto r = testing::random_scored(12, 90, 9);
  ScoredSet s = to_set(r);
  ScoredSet f = s;
  for (int& y : f.labels) y = 1 - y;
  EXPECT_NEAR(auroc(s) + auroc(f), 1.0, 1e-12);
  ScoredSet neg = s;
  for (double& x : neg.scores) x = -x;
  EXPECT_NEAR(auroc(s) + auroc(neg), 1.0, 1e-12);
}

TEST(Auroc, PermutationInvariance) {
  const auto r = testing::random_scored(13, 100, 7);
  ScoredSet s = to_set(r);
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(4));
  ScoredSet p;
  for (std::size_t i : order) {
    p.scores.push_back(s.scores[i]);
    p.labels.push_back(s.labels[i]);
  }
  EXPECT_DOUBLE_EQ(auroc(s), auroc(p));
  EXPECT_DOUBLE_EQ(auprc(s), auprc(p));
  EXPECT_DOUBLE_EQ(best_threshold_accuracy(s).accuracy, best_threshold_accuracy(p).accuracy);
}

TEST(Auroc, Errors) {
  try {
    auroc({{0.1, 0.2}, {1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
  }
  EXPECT_THROW(auprc({{0.1, 0.2}, {0, 0}}), Error);
  EXPECT_THROW(auroc({{0.1}, {1, 0}}), Error);
  EXPECT_THROW(auroc({{}, {}}), Error);
}

TEST(BestThreshold, HandExample) {
  const ScoredSet s{{0.1, 0.2, 0.3, 0.7, 0.8}, {0, 0, 1, 1, 1}};
  const ThresholdResult t = best_threshold_accuracy(s);
  EXPECT_DOUBLE_EQ(t.accuracy, 1.0);
  EXPECT_TRUE(t.positive_above);
  EXPECT_DOUBLE_EQ(t.threshold, 0.25);
  EXPECT_DOUBLE_EQ(accuracy_at(s, 0.25, true), 1.0);
  EXPECT_DOUBLE_EQ(accuracy_at(s, 0.25, false), 0.0);

  const ScoredSet inverted{{0.1, 0.2, 0.9}, {1, 1, 0}};
  const ThresholdResult u = best_threshold_accuracy(inverted);
  EXPECT_DOUBLE_EQ(u.accuracy, 1.0);
  EXPECT_FALSE(u.positive_above);
}

TEST(BestThreshold, MatchesBruteForceAndBeatsPrior) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto r = testing::random_scored(seed + 100, 10 + static_cast<int>(seed * 7 % 120),
                                          3 + static_cast<int>(seed % 9));
    const ScoredSet s = to_set(r);
    const ThresholdResult t = best_threshold_accuracy(s);
    EXPECT_NEAR(t.accuracy, testing::brute_best_accuracy(r.scores, r.labels), 1e-12);
    EXPECT_NEAR(accuracy_at(s, t.threshold, t.positive_above), t.accuracy, 1e-12);
    const double pos = static_cast<double>(s.positives()) / s.scores.size();
    EXPECT_GE(t.accuracy + 1e-12, std::max(pos, 1.0 - pos));
  }
}

TEST(BestThreshold, BisectionNeverBeatsExhaustive) {
  int strictly_worse = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto r = testing::random_scored(seed + 300, 80, 30);
    const ScoredSet s = to_set(r);
    std::vector<double> probed;
    const ThresholdResult b = bisection_threshold_accuracy(s, 16, &probed);
    const ThresholdResult e = best_threshold_accuracy(s);
    EXPECT_LE(b.accuracy, e.accuracy + 1e-12);
    EXPECT_FALSE(probed.empty());
    if (b.accuracy < e.accuracy) ++strictly_worse;
  }
  EXPECT_GT(strictly_worse, 0);
}

TEST(Evaluate, FillsReport) {
  const ScoredSet s{{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}};
  const EvalReport r = evaluate("x", s, 0.002);
  EXPECT_EQ(r.name, "x");
  EXPECT_DOUBLE_EQ(r.auroc, 1.0);
  EXPECT_DOUBLE_EQ(r.auprc, 1.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.seconds_per_patch, 0.002);
}

TEST(Reports, CsvAndJson) {
  testing::TempDir dir("eval");
  const std::vector<EvalReport> reports{
      evaluate("a", {{0.9, 0.1}, {1, 0}}), evaluate("b", {{0.1, 0.9}, {1, 0}}, 0.5)};
  write_reports_csv(dir / "r.csv", reports);
  std::ifstream csv(dir / "r.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "name,auroc,auprc,accuracy,threshold,positive_above,seconds_per_patch");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) {
    if (line.empty()) continue;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    ++rows;
  }
  EXPECT_EQ(rows, 2);

  write_reports_json(dir / "r.json", reports);
  std::ifstream js(dir / "r.json");
  const auto j = nlohmann::json::parse(js);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["name"], "b");
  EXPECT_DOUBLE_EQ(j[0]["auroc"].get<double>(), 1.0);
  EXPECT_NE(format_reports(reports).find("b"), std::string::npos);
}

TEST(ScoreCsv, JoinsManifestLabels) {
  testing::TempDir dir("eval");
  DatasetManifest m;
  m.records = {{.id = "p", .label = 1}, {.id = "q", .label = 0}, {.id = "r", .label = 1}};
  {
    std::ofstream out(dir / "s.csv");
    out << "id,score\nq,0.25\r\np,0.75\n\nr,1e-1\n";
  }
  const ScoredSet s = read_score_csv(dir / "s.csv", m);
  EXPECT_EQ(s.scores, (std::vector<double>{0.25, 0.75, 0.1}));
  EXPECT_EQ(s.labels, (std::vector<int>{0, 1, 1}));

  {
    std::ofstream out(dir / "bad.csv");
    out << "p,0.5\nzz,0.1\n";
  }
  try {
    read_score_csv(dir / "bad.csv", m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptData);
  }
  {
    std::ofstream out(dir / "nan.csv");
    out << "p,0.5\nq,abc\n";
  }
  EXPECT_THROW(read_score_csv(dir / "nan.csv", m), Error);
  EXPECT_THROW(read_score_csv(dir / "none.csv", m), Error);
}

TEST(Variant, Names) {
  const auto all = all_variants();
  ASSERT_EQ(all.size(), 6u);
  for (Variant v : all) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_STREQ(to_string(Variant::kFsBand), "FS-BAND");
  EXPECT_THROW(parse_variant("DB-I"), Error);
}

struct SmallBank {
  FrequencyBank bank;
  NetConfig net;
};

SmallBank small_bank() {
  SynthConfig sc;
  sc.count_per_class = 24;
  sc.side = 16;
  const Corpus c = gen_dataset(sc);
  SmallBank b;
  LfmConfig lfm;
  lfm.iterations = 10;
  b.bank = build_bank(c.patches, c.labels(), lfm, 2);
  b.net.branch_channels = {4, 8};
  b.net.early_tap_channels = 4;
  b.net.input_side = 16;
  return b;
}

TEST(Ablation, VariantInputs) {
  const SmallBank b = small_bank();
  ASSERT_EQ(b.bank.hf.size(), 48u);
  const auto sb = variant_samples(b.bank, Variant::kSbLfm);
  EXPECT_TRUE(sb[0].b.empty());
  EXPECT_EQ(sb[0].a.size(), 256u);
  const auto db = variant_samples(b.bank, Variant::kDbHfm);
  EXPECT_EQ(db[3].a, db[3].b);
  const auto fs = variant_samples(b.bank, Variant::kFsBand);
  EXPECT_EQ(fs[3].a, db[3].a);
  EXPECT_NE(fs[3].a, fs[3].b);
  EXPECT_EQ(fs[3].b, sb[3].a);
  EXPECT_FALSE(variant_net(b.net, Variant::kSbI).dual_branch);
  EXPECT_TRUE(variant_net(b.net, Variant::kDbLfm).dual_branch);
  EXPECT_THROW(build_bank(std::vector<Patch>(2, gen_background(BackgroundKind::kTexture, 16, 1)),
                          std::vector<int>{1}),
               Error);
}

TEST(Ablation, OneRowPerVariantAndDeterministic) {
  const SmallBank b = small_bank();
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 8;
  const auto variants = all_variants();
  const auto rows = run_ablation(b.bank, variants, b.net, tc);
  ASSERT_EQ(rows.size(), variants.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].variant, variants[i]);
    EXPECT_EQ(rows[i].report.name, to_string(variants[i]));
    EXPECT_GE(rows[i].report.auroc, 0.0);
    EXPECT_LE(rows[i].report.auroc, 1.0);
    EXPECT_EQ(rows[i].train.split.test, rows[0].train.split.test);
  }
  tc.jobs = 3;
  const auto again = run_ablation(b.bank, variants, b.net, tc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(again[i].train, rows[i].train);
    EXPECT_EQ(again[i].report.auroc, rows[i].report.auroc);
  }
}

TEST(Speed, PositiveAndValidated) {
  NetConfig net;
  net.branch_channels = {4, 8};
  net.early_tap_channels = 4;
  net.input_side = 16;
  const Model m = init_model(net);
  std::vector<Patch> patches;
  for (std::uint64_t k = 0; k < 12; ++k) {
    patches.push_back(gen_background(BackgroundKind::kLowFreqNoise, 16, k));
  }
  const SpeedReport r = benchmark_speed(m, patches, 3);
  EXPECT_GT(r.seconds_per_patch, 0.0);
  EXPECT_TRUE(std::isfinite(r.seconds_per_patch));
  EXPECT_EQ(r.rep_seconds.size(), 3u);
  EXPECT_EQ(r.patches, 12u);
  EXPECT_THROW(benchmark_speed(m, std::span(patches).first(5), 3), Error);
  EXPECT_THROW(benchmark_speed(m, patches, 2), Error);
}

}  // namespace
}  // namespace fsband
