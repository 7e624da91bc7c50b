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

// Layered tool settings: built-in defaults, then a JSON config file, then
// command-line flags.
//
// Config file layout (every key optional, unknown keys rejected):
//
//   {
//     "seed": 7, "jobs": 1, "patch_side": 64, "pool_fraction": 80,
//     "lfm":     {"alpha", "beta", "iterations", "tol", "edge_width"},
//     "net":     {"branch_channels", "dual_branch", "seed"},
//     "train":   {"learning_rate", "batch_size", "epochs", "split_ratio",
//                 "seed", "adam_beta1", "adam_beta2", "adam_epsilon"},
//     "masking": {"gamma"},
//     "synth":   {"count_per_class", "kinds", "bits", "dither_negatives",
//                 "seed"},
//     "detect":  {"pad_policy", "pooling", "label_threshold", "freq_scope"}
//   }
//
// "seed" and "patch_side" at the top level fan out to every section that
// has one.

#ifndef FSBAND_TOOLS_SETTINGS_HPP_
#define FSBAND_TOOLS_SETTINGS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fsband/freqmaps.hpp"
#include "fsband/metric.hpp"
#include "fsband/net.hpp"
#include "fsband/synth.hpp"

namespace fsband::tools {

struct Settings {
  LfmConfig lfm;
  NetConfig net;
  TrainConfig train;
  SynthConfig synth;
  DetectConfig detect;
  int jobs = 1;

  // Pushes shared values (lfm, gamma, jobs) into the per-stage configs.
  void sync();
  void set_seed(std::uint64_t seed);
  void set_patch_side(int side);
};

// Applies a JSON config document on top of `s`. Throws kInvalidArgument on
// unknown keys or wrongly typed values.
void apply_config_text(Settings& s, const std::string& text,
                       const std::string& origin);
// Throws kFileNotFound when the file is missing.
void apply_config_file(Settings& s, const std::filesystem::path& path);

// Explicit --config path, else FSBAND_CONFIG, else none.
std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::string>& flag);

}  // namespace fsband::tools

#endif  // FSBAND_TOOLS_SETTINGS_HPP_
