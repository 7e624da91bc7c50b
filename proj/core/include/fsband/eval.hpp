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

// Classification metrics, threshold search, timing and the branch/input
// ablation harness.

#ifndef FSBAND_EVAL_HPP_
#define FSBAND_EVAL_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fsband/freqmaps.hpp"
#include "fsband/image.hpp"
#include "fsband/net.hpp"
#include "fsband/synth.hpp"

namespace fsband {

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;  // 0 or 1

  // Throws kLengthMismatch, kEmptyInput.
  void validate() const;
  std::size_t positives() const;
};

// Trapezoidal area under the ROC curve; equal scores form one ROC step.
// Throws kSingleClass.
double auroc(const ScoredSet& s);

// Right-continuous step area under the precision-recall curve with the same
// tie grouping: sum over distinct thresholds of delta-recall * precision.
// Throws kSingleClass.
double auprc(const ScoredSet& s);

struct ThresholdResult {
  double threshold = 0.0;
  double accuracy = 0.0;
  // true: score >= threshold predicts positive; false: score < threshold.
  bool positive_above = true;
};

double accuracy_at(const ScoredSet& s, double threshold, bool positive_above);

// Exhaustive scan over the midpoints of consecutive distinct scores plus
// one threshold below the minimum and one above the maximum, in both
// orientations. Ties resolve to the lowest threshold, positive_above first.
ThresholdResult best_threshold_accuracy(const ScoredSet& s);

// Half-interval search over [min, max]: at each step keeps the half whose
// midpoint scores higher. Not guaranteed optimal. Every probed threshold is
// appended to `probed` when given.
ThresholdResult bisection_threshold_accuracy(const ScoredSet& s,
                                             int steps = 32,
                                             std::vector<double>* probed = nullptr);

struct EvalReport {
  std::string name;
  double auroc = 0.0;
  double auprc = 0.0;
  double accuracy = 0.0;
  double threshold = 0.0;
  bool positive_above = true;
  double seconds_per_patch = 0.0;  // 0 when not measured
};

EvalReport evaluate(std::string name, const ScoredSet& s,
                    double seconds_per_patch = 0.0);

struct SpeedReport {
  double seconds_per_patch = 0.0;      // median over repetitions
  std::vector<double> rep_seconds;     // per-patch time of each repetition
  std::size_t patches = 0;
};

// Times the full per-patch pipeline (HFM, LFM, forward) sequentially; one
// untimed warm-up pass precedes the repetitions. Throws kInvalidArgument
// for fewer than 10 patches or 3 repetitions.
SpeedReport benchmark_speed(const Model& model, std::span<const Patch> patches,
                            int repetitions, const LfmConfig& lfm_cfg = {});

// Columns: name,auroc,auprc,accuracy,threshold,positive_above,seconds_per_patch.
void write_reports_csv(const std::filesystem::path& path,
                       std::span<const EvalReport> reports);
void write_reports_json(const std::filesystem::path& path,
                        std::span<const EvalReport> reports);
std::string format_reports(std::span<const EvalReport> reports);

// Reads a CSV of (id, score) rows, an optional header line included, and
// joins it to the manifest labels. Throws kFileNotFound, kCorruptData for
// malformed rows or ids absent from the manifest.
ScoredSet read_score_csv(const std::filesystem::path& path,
                         const DatasetManifest& manifest);

enum class Variant { kSbHfm, kSbLfm, kSbI, kDbHfm, kDbLfm, kFsBand };

const char* to_string(Variant v);
// Throws kUnknownKind.
Variant parse_variant(const std::string& name);
std::vector<Variant> all_variants();

// Per-patch inputs shared by every variant.
struct FrequencyBank {
  std::vector<HFMap> hf;
  std::vector<LFMap> lf;
  std::vector<Patch> raw;
  std::vector<int> labels;
};

// Throws kLengthMismatch.
FrequencyBank build_bank(std::span<const Patch> patches,
                         std::span<const int> labels,
                         const LfmConfig& lfm_cfg = {}, int jobs = 1);

// Inputs for one variant: single-branch variants fill only `a`; DB-HFM and
// DB-LFM repeat the same map in both slots.
std::vector<Sample> variant_samples(const FrequencyBank& bank, Variant v);
NetConfig variant_net(const NetConfig& base, Variant v);

struct AblationRow {
  Variant variant;
  EvalReport report;
  TrainReport train;
  Model model;  // trained weights
};

// Trains every variant from the same initial seed on the same split and
// scores the held-out part.
std::vector<AblationRow> run_ablation(const FrequencyBank& bank,
                                      std::span<const Variant> variants,
                                      const NetConfig& net,
                                      const TrainConfig& cfg);

}  // namespace fsband

#endif  // FSBAND_EVAL_HPP_
