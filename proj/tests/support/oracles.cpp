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

#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include <unistd.h>

namespace fsband::testing {

namespace {

int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace

std::vector<double> correlate3x3(std::span<const double> plane, int width,
                                 int height, const double (&k)[3][3]) {
  std::vector<double> out(plane.size(), 0.0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const int rr = mirror(r + i - 1, height);
          const int cc = mirror(c + j - 1, width);
          acc += k[i][j] * plane[rr * width + cc];
        }
      }
      out[r * width + c] = acc;
    }
  }
  return out;
}

double pairwise_auroc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 0) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

double enumerated_auprc(std::span<const double> scores, std::span<const int> labels) {
  const std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  double total_pos = 0.0;
  for (int y : labels) total_pos += y != 0 ? 1.0 : 0.0;
  double area = 0.0;
  double prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] < t) continue;
      (labels[i] != 0 ? tp : fp) += 1.0;
    }
    const double recall = tp / total_pos;
    area += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return area;
}

double brute_best_accuracy(std::span<const double> scores, std::span<const int> labels) {
  std::vector<double> cands(scores.begin(), scores.end());
  cands.push_back(INFINITY);
  double best = 0.0;
  for (double t : cands) {
    int up = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if ((scores[i] >= t) == (labels[i] != 0)) ++up;
    }
    const double n = static_cast<double>(scores.size());
    best = std::max({best, up / n, (n - up) / n});
  }
  return best;
}

double sign_test_p(int wins, int n) {
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0) - n * std::log(2.0));
  }
  return std::min(1.0, p);
}

RandomScores random_scored(std::uint64_t seed, int n, int levels) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::bernoulli_distribution coin(0.5);
  RandomScores out;
  for (int i = 0; i < n; ++i) {
    out.scores.push_back(level(gen) / static_cast<double>(levels));
    out.labels.push_back(coin(gen) ? 1 : 0);
  }
  out.labels[0] = 1;
  out.labels[1] = 0;
  return out;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("fsband-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace fsband::testing
