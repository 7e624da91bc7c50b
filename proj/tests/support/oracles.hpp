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

// Independent reference implementations used to check the library. They
// favor obviousness over speed and share no code with fsband.

#ifndef FSBAND_TESTS_ORACLES_HPP_
#define FSBAND_TESTS_ORACLES_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fsband::testing {

// 3x3 correlation with mirrored borders (index -1 reads 0, index n reads
// n-1).
std::vector<double> correlate3x3(std::span<const double> plane, int width,
                                 int height, const double (&k)[3][3]);

// P(score+ > score-) + P(tie) / 2 over every positive/negative pair.
double pairwise_auroc(std::span<const double> scores, std::span<const int> labels);

// Precision and recall at every distinct threshold t (predict positive when
// score >= t), visited from the highest t down; area = sum of
// (recall - previous recall) * precision.
double enumerated_auprc(std::span<const double> scores, std::span<const int> labels);

// Best accuracy over thresholds {every score, +inf} in both orientations.
double brute_best_accuracy(std::span<const double> scores, std::span<const int> labels);

// One-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2).
double sign_test_p(int wins, int n);

struct RandomScores {
  std::vector<double> scores;
  std::vector<int> labels;
};

// n records with both classes present; scores drawn from `levels` distinct
// values so ties are common.
RandomScores random_scored(std::uint64_t seed, int n, int levels);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fsband::testing

#endif  // FSBAND_TESTS_ORACLES_HPP_
