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

#include "fsband/error.hpp"
#include "fsband/eval.hpp"
#include "fsband/parallel.hpp"

namespace fsband {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kSbHfm: return "SB-HFM";
    case Variant::kSbLfm: return "SB-LFM";
    case Variant::kSbI: return "SB-I";
    case Variant::kDbHfm: return "DB-HFM";
    case Variant::kDbLfm: return "DB-LFM";
    case Variant::kFsBand: return "FS-BAND";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : all_variants()) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorCode::kUnknownKind, "unknown variant '" + name + "'");
}

std::vector<Variant> all_variants() {
  return {Variant::kSbHfm, Variant::kSbLfm, Variant::kSbI,
          Variant::kDbHfm, Variant::kDbLfm, Variant::kFsBand};
}

FrequencyBank build_bank(std::span<const Patch> patches,
                         std::span<const int> labels,
                         const LfmConfig& lfm_cfg, int jobs) {
  if (patches.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "patches and labels differ in length");
  }
  lfm_cfg.validate();
  FrequencyBank bank;
  const std::size_t n = patches.size();
  bank.hf.resize(n);
  bank.lf.resize(n);
  bank.raw.assign(patches.begin(), patches.end());
  bank.labels.assign(labels.begin(), labels.end());
  parallel_for(n, jobs, [&](std::size_t i) {
    bank.hf[i] = hfm(patches[i]);
    bank.lf[i] = lfm(patches[i], lfm_cfg);
  });
  return bank;
}

namespace {

std::vector<float> to_float(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

std::vector<Sample> variant_samples(const FrequencyBank& bank, Variant v) {
  std::vector<Sample> out(bank.labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Sample& s = out[i];
    s.label = bank.labels[i];
    switch (v) {
      case Variant::kSbHfm:
        s.a = to_float(bank.hf[i].data);
        break;
      case Variant::kSbLfm:
        s.a = to_float(bank.lf[i].data);
        break;
      case Variant::kSbI:
        s.a = to_float(bank.raw[i].data);
        break;
      case Variant::kDbHfm:
        s.a = to_float(bank.hf[i].data);
        s.b = s.a;
        break;
      case Variant::kDbLfm:
        s.a = to_float(bank.lf[i].data);
        s.b = s.a;
        break;
      case Variant::kFsBand:
        s.a = to_float(bank.hf[i].data);
        s.b = to_float(bank.lf[i].data);
        break;
    }
  }
  return out;
}

NetConfig variant_net(const NetConfig& base, Variant v) {
  NetConfig cfg = base;
  cfg.dual_branch =
      v == Variant::kDbHfm || v == Variant::kDbLfm || v == Variant::kFsBand;
  return cfg;
}

std::vector<AblationRow> run_ablation(const FrequencyBank& bank,
                                      std::span<const Variant> variants,
                                      const NetConfig& net,
                                      const TrainConfig& cfg) {
  cfg.validate();
  const DataSplit split = split_dataset(bank.labels.size(), cfg.split_ratio, cfg.seed);
  std::vector<AblationRow> rows;
  rows.reserve(variants.size());
  for (Variant v : variants) {
    const std::vector<Sample> samples = variant_samples(bank, v);
    auto [model, report] = train(init_model(variant_net(net, v)), samples, split, cfg);
    ScoredSet scored{report.test_scores, report.test_labels};
    rows.push_back(AblationRow{v, evaluate(to_string(v), scored), std::move(report),
                               std::move(model)});
  }
  return rows;
}

}  // namespace fsband
