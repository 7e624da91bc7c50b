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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fsband/error.hpp"
#include "fsband/eval.hpp"
#include "fsband/metric.hpp"
#include "fsband/net.hpp"
#include "fsband/synth.hpp"
#include "json.hpp"
#include "settings.hpp"

namespace fsband::tools {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Raised for failures reading a model file so they map to their own exit
// code regardless of the underlying error kind.
class ModelError : public Error {
 public:
  explicit ModelError(const Error& e) : Error(e.code(), e.what(), e.path()) {}
};

Model load_model_checked(const fs::path& path) {
  try {
    return load_model(path);
  } catch (const Error& e) {
    throw ModelError(e);
  }
}

struct Common {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> patch_side;

  void attach(CLI::App* app) {
    app->add_option("--config", config,
                    "JSON config file (falls back to $FSBAND_CONFIG)");
    app->add_option("--seed", seed, "Seed for every random stream");
    app->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
    app->add_option("--patch-side", patch_side, "Patch side in pixels");
  }

  Settings resolve() const {
    Settings s;
    if (const auto path = resolve_config_path(config)) apply_config_file(s, *path);
    if (seed) s.set_seed(*seed);
    if (jobs) s.jobs = *jobs;
    if (patch_side) s.set_patch_side(*patch_side);
    s.sync();
    return s;
  }
};

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "short write", path.string());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad integer '" + item + "'");
    }
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

struct LoadedCorpus {
  DatasetManifest manifest;
  std::vector<Patch> patches;
  std::vector<int> labels;
};

LoadedCorpus load_manifest_corpus(const fs::path& manifest_path, int side) {
  LoadedCorpus c;
  c.manifest = read_manifest(manifest_path);
  if (c.manifest.records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "manifest has no records",
                manifest_path.string());
  }
  c.patches = load_corpus_patches(c.manifest, manifest_path.parent_path(), side);
  for (const auto& r : c.manifest.records) c.labels.push_back(r.label);
  return c;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  Common common;
  std::string image;
  std::string model;
  std::string out_dir = ".";
  std::optional<double> pool_fraction;
  std::optional<std::string> pooling;
  std::optional<std::string> pad;
  std::optional<std::string> freq_scope;
  std::optional<double> threshold;
  std::optional<double> gamma;
  bool dump_maps = false;
  bool dump_masking = false;
};

int cmd_detect(const DetectArgs& a, std::ostream& out) {
  Settings s = a.common.resolve();
  DetectConfig cfg = s.detect;
  if (a.pool_fraction) cfg.pool_fraction = *a.pool_fraction;
  if (a.pooling) cfg.pooling = parse_pooling_mode(*a.pooling);
  if (a.pad) cfg.pad_policy = parse_pad_policy(*a.pad);
  if (a.freq_scope) cfg.freq_scope = parse_freq_scope(*a.freq_scope);
  if (a.threshold) cfg.label_threshold = *a.threshold;
  if (a.gamma) cfg.gamma = *a.gamma;

  const Image image = load_image(a.image);
  const Model model = load_model_checked(a.model);
  const Detection det = detect(image, model, cfg);

  const fs::path dir = a.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string stem = fs::path(a.image).stem().string();
  save_png(dir / (stem + "_bandmap.png"),
           normalize_minmax(det.map.data, det.map.width, det.map.height));

  ordered_json j;
  j["image"] = fs::path(a.image).filename().string();
  j["width"] = image.width();
  j["height"] = image.height();
  j["q"] = det.quality.q;
  j["m_patches"] = det.quality.m_patches;
  j["p"] = det.quality.pool_fraction;
  j["pooling"] = to_string(det.quality.mode);
  ordered_json patches = ordered_json::array();
  for (const PatchProvenance& p : det.map.patches) {
    ordered_json e;
    e["k"] = p.k;
    e["label"] = p.label;
    e["w"] = p.weight;
    e["sf"] = p.sf;
    e["probability"] = p.probability;
    patches.push_back(std::move(e));
  }
  j["per_patch"] = std::move(patches);
  write_json(dir / (stem + "_result.json"), j);

  if (a.dump_maps) {
    dump_map_png(dir / (stem + "_hfm"),
                 sobel_magnitude(image.pixels(), image.width(), image.height()),
                 image.width(), image.height());
    const LfmResult l = lfm_plane(image.pixels(), image.width(), image.height(), cfg.lfm);
    dump_map_png(dir / (stem + "_lfm"), l.smooth, image.width(), image.height());
  }
  if (a.dump_masking) {
    const fs::path path = dir / (stem + "_masking.csv");
    std::ofstream csv(path, std::ios::trunc);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write masking dump", path.string());
    csv << "k,cf,rf,sf,eps,w\n";
    char row[256];
    for (const PatchProvenance& p : det.map.patches) {
      std::snprintf(row, sizeof(row), "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", p.k, p.cf, p.rf,
                    p.sf, det.eps, p.weight);
      csv << row;
    }
  }

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", det.quality.q);
  out << buf << '\n';
  return kExitOk;
}

struct TrainArgs {
  Common common;
  std::string manifest;
  std::string model_out;
  std::optional<std::string> report;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<int> batch_size;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  Settings s = a.common.resolve();
  if (a.epochs) s.train.epochs = *a.epochs;
  if (a.lr) s.train.learning_rate = *a.lr;
  if (a.batch_size) s.train.batch_size = *a.batch_size;
  s.train.validate();
  s.net.validate();

  const LoadedCorpus c = load_manifest_corpus(a.manifest, s.net.input_side);
  const FrequencyBank bank = build_bank(c.patches, c.labels, s.lfm, s.jobs);
  const Variant v = s.net.dual_branch ? Variant::kFsBand : Variant::kSbHfm;
  const std::vector<Sample> samples = variant_samples(bank, v);
  auto [model, report] = train(init_model(s.net), samples, s.train);
  save_model(model, a.model_out);

  ordered_json j;
  j["model"] = fs::path(a.model_out).filename().string();
  j["records"] = c.labels.size();
  j["train_size"] = report.split.train.size();
  j["test_size"] = report.split.test.size();
  j["epochs"] = s.train.epochs;
  j["seed"] = s.train.seed;
  j["epoch_loss"] = report.epoch_loss;
  j["heldout_accuracy"] = report.heldout_accuracy;
  j["final_heldout_accuracy"] = report.final_accuracy();
  const ScoredSet scored{report.test_scores, report.test_labels};
  const std::size_t pos = scored.positives();
  if (pos > 0 && pos < scored.scores.size()) {
    j["heldout_auroc"] = auroc(scored);
    j["heldout_auprc"] = auprc(scored);
  }
  fs::path report_path = a.report ? fs::path(*a.report)
                                  : fs::path(a.model_out).replace_extension(".report.json");
  write_json(report_path, j);

  char buf[128];
  std::snprintf(buf, sizeof(buf), "epochs %d  final loss %.4f  held-out accuracy %.4f\n",
                s.train.epochs, report.epoch_loss.back(), report.final_accuracy());
  out << buf;
  return kExitOk;
}

struct SynthArgs {
  Common common;
  std::string out_dir;
  std::optional<int> count;
  std::optional<std::string> bits;
  std::optional<std::string> kinds;
  bool no_dither = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  Settings s = a.common.resolve();
  if (a.count) s.synth.count_per_class = *a.count;
  if (a.bits) s.synth.bits = parse_int_list(*a.bits);
  if (a.kinds) {
    s.synth.kinds.clear();
    for (const auto& k : split_names(*a.kinds)) {
      s.synth.kinds.push_back(parse_background_kind(k));
    }
  }
  if (a.no_dither) s.synth.dither_negatives = false;
  Corpus corpus = gen_dataset(s.synth);
  write_dataset(corpus, a.out_dir);
  out << "wrote " << corpus.manifest.records.size() << " records ("
      << corpus.manifest.count(1) << " banded, " << corpus.manifest.count(0)
      << " clean) to " << (fs::path(a.out_dir) / "manifest.jsonl").string() << '\n';
  return kExitOk;
}

struct EvalArgs {
  Common common;
  std::string manifest;
  std::optional<std::string> model;
  std::optional<std::string> scores;
  std::string name = "FS-BAND";
  std::string subset = "all";
  std::optional<std::string> csv;
  std::optional<std::string> json;
  int speed_patches = 50;
  int speed_reps = 3;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  Settings s = a.common.resolve();
  if (a.model.has_value() == a.scores.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "pass exactly one of --model or --scores");
  }
  EvalReport report;
  if (a.scores) {
    const DatasetManifest manifest = read_manifest(a.manifest);
    report = evaluate(a.name, read_score_csv(*a.scores, manifest));
  } else {
    const Model model = load_model_checked(*a.model);
    const LoadedCorpus c = load_manifest_corpus(a.manifest, model.config.input_side);
    std::vector<std::size_t> index(c.labels.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
    if (a.subset == "heldout") {
      index = split_dataset(c.labels.size(), s.train.split_ratio, s.train.seed).test;
    } else if (a.subset != "all") {
      throw Error(ErrorCode::kInvalidArgument, "subset must be 'all' or 'heldout'");
    }
    std::vector<Patch> patches;
    std::vector<int> labels;
    for (std::size_t i : index) {
      patches.push_back(c.patches[i]);
      labels.push_back(c.labels[i]);
    }
    const FrequencyBank bank = build_bank(patches, labels, s.lfm, s.jobs);
    const Variant v = model.config.dual_branch ? Variant::kFsBand : Variant::kSbHfm;
    const std::vector<Sample> samples = variant_samples(bank, v);
    const ScoredSet scored{predict(model, samples, s.jobs), labels};
    double speed = 0.0;
    const std::size_t n_speed =
        std::min(patches.size(), static_cast<std::size_t>(std::max(a.speed_patches, 10)));
    if (n_speed >= 10) {
      speed = benchmark_speed(model, std::span(patches).first(n_speed),
                              std::max(a.speed_reps, 3), s.lfm)
                  .seconds_per_patch;
    }
    report = evaluate(a.name, scored, speed);
  }
  const std::vector<EvalReport> rows{report};
  if (a.csv) write_reports_csv(*a.csv, rows);
  if (a.json) write_reports_json(*a.json, rows);
  out << format_reports(rows);
  return kExitOk;
}

struct AblateArgs {
  Common common;
  std::string manifest;
  std::optional<std::string> variants;
  std::optional<int> epochs;
  std::optional<std::string> csv;
  std::optional<std::string> json;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  Settings s = a.common.resolve();
  if (a.epochs) s.train.epochs = *a.epochs;
  std::vector<Variant> variants = all_variants();
  if (a.variants) {
    variants.clear();
    for (const auto& name : split_names(*a.variants)) variants.push_back(parse_variant(name));
  }
  const LoadedCorpus c = load_manifest_corpus(a.manifest, s.net.input_side);
  const FrequencyBank bank = build_bank(c.patches, c.labels, s.lfm, s.jobs);
  const std::vector<AblationRow> rows = run_ablation(bank, variants, s.net, s.train);
  std::vector<EvalReport> reports;
  for (const auto& r : rows) reports.push_back(r.report);
  if (a.csv) write_reports_csv(*a.csv, reports);
  if (a.json) write_reports_json(*a.json, reports);
  out << format_reports(reports);
  return kExitOk;
}

struct BenchArgs {
  Common common;
  std::string model;
  std::string manifest;
  int patches = 50;
  int reps = 5;
  std::optional<std::string> json;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  Settings s = a.common.resolve();
  const Model model = load_model_checked(a.model);
  const LoadedCorpus c = load_manifest_corpus(a.manifest, model.config.input_side);
  const std::size_t n =
      std::min(c.patches.size(), static_cast<std::size_t>(std::max(a.patches, 0)));
  const SpeedReport r =
      benchmark_speed(model, std::span(c.patches).first(n), a.reps, s.lfm);
  if (a.json) {
    ordered_json j;
    j["patches"] = r.patches;
    j["repetitions"] = r.rep_seconds.size();
    j["seconds_per_patch"] = r.seconds_per_patch;
    j["rep_seconds_per_patch"] = r.rep_seconds;
    write_json(*a.json, j);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%zu patches x %zu reps: %.6f s/patch\n", r.patches,
                r.rep_seconds.size(), r.seconds_per_patch);
  out << buf;
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDegenerateDataset:
    case ErrorCode::kSingleClass:
      return kExitDegenerate;
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kChecksumMismatch:
      return kExitModel;
    default:
      return kExitInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"No-reference banding detector", "fsband"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  DetectArgs detect_args;
  CLI::App* detect_cmd = app.add_subcommand("detect", "Banding map and quality score of an image");
  detect_args.common.attach(detect_cmd);
  detect_cmd->add_option("image", detect_args.image, "Input PNG/PGM/PPM")->required();
  detect_cmd->add_option("--model", detect_args.model, "Model file")->required();
  detect_cmd->add_option("--out", detect_args.out_dir, "Output directory");
  detect_cmd->add_option("--pool-fraction", detect_args.pool_fraction, "Pooled percentage p");
  detect_cmd->add_option("--pooling", detect_args.pooling, "per-patch or global");
  detect_cmd->add_option("--pad", detect_args.pad, "reflect or clamp");
  detect_cmd->add_option("--freq-scope", detect_args.freq_scope, "patch or image");
  detect_cmd->add_option("--threshold", detect_args.threshold, "Banded-label probability threshold");
  detect_cmd->add_option("--gamma", detect_args.gamma, "Masking exponent");
  detect_cmd->add_flag("--dump-maps", detect_args.dump_maps, "Also write HFM/LFM images");
  detect_cmd->add_flag("--dump-masking", detect_args.dump_masking,
                       "Also write per-patch cf, rf, sf and weight as CSV");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a classifier on a manifest");
  train_args.common.attach(train_cmd);
  train_cmd->add_option("--manifest", train_args.manifest, "JSON Lines manifest")->required();
  train_cmd->add_option("--out", train_args.model_out, "Model file to write")->required();
  train_cmd->add_option("--report", train_args.report, "Training report JSON");
  train_cmd->add_option("--epochs", train_args.epochs, "Training epochs");
  train_cmd->add_option("--lr", train_args.lr, "Adam learning rate");
  train_cmd->add_option("--batch-size", train_args.batch_size, "Mini-batch size");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic banding corpus");
  synth_args.common.attach(synth_cmd);
  synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth_args.count, "Records per class");
  synth_cmd->add_option("--bits", synth_args.bits, "Banding bit depths, e.g. 3,4,5");
  synth_cmd->add_option("--kinds", synth_args.kinds, "Background kinds, comma separated");
  synth_cmd->add_flag("--no-dither", synth_args.no_dither, "Round negatives without dither");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Classification metrics on a manifest");
  eval_args.common.attach(eval_cmd);
  eval_cmd->add_option("--manifest", eval_args.manifest, "JSON Lines manifest")->required();
  eval_cmd->add_option("--model", eval_args.model, "Model file to score with");
  eval_cmd->add_option("--scores", eval_args.scores, "External CSV of id,score");
  eval_cmd->add_option("--name", eval_args.name, "Row name in the report");
  eval_cmd->add_option("--subset", eval_args.subset, "all or heldout");
  eval_cmd->add_option("--csv", eval_args.csv, "CSV report path");
  eval_cmd->add_option("--json", eval_args.json, "JSON report path");
  eval_cmd->add_option("--speed-patches", eval_args.speed_patches, "Patches timed for speed");
  eval_cmd->add_option("--speed-reps", eval_args.speed_reps, "Timing repetitions");

  AblateArgs ablate_args;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Train and score branch/input variants");
  ablate_args.common.attach(ablate_cmd);
  ablate_cmd->add_option("--manifest", ablate_args.manifest, "JSON Lines manifest")->required();
  ablate_cmd->add_option("--variants", ablate_args.variants,
                         "Subset of SB-HFM,SB-LFM,SB-I,DB-HFM,DB-LFM,FS-BAND");
  ablate_cmd->add_option("--epochs", ablate_args.epochs, "Training epochs");
  ablate_cmd->add_option("--csv", ablate_args.csv, "CSV report path");
  ablate_cmd->add_option("--json", ablate_args.json, "JSON report path");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Per-patch timing of the pipeline");
  bench_args.common.attach(bench_cmd);
  bench_cmd->add_option("--model", bench_args.model, "Model file")->required();
  bench_cmd->add_option("--manifest", bench_args.manifest, "JSON Lines manifest")->required();
  bench_cmd->add_option("--patches", bench_args.patches, "Patches per repetition");
  bench_cmd->add_option("--reps", bench_args.reps, "Repetitions");
  bench_cmd->add_option("--json", bench_args.json, "JSON report path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (detect_cmd->parsed()) return cmd_detect(detect_args, out);
    if (train_cmd->parsed()) return cmd_train(train_args, out);
    if (synth_cmd->parsed()) return cmd_synth(synth_args, out);
    if (eval_cmd->parsed()) return cmd_eval(eval_args, out);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_args, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_args, out);
  } catch (const ModelError& e) {
    err << "fsband: model: " << e.what() << '\n';
    return kExitModel;
  } catch (const Error& e) {
    err << "fsband: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "fsband: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fsband::tools
