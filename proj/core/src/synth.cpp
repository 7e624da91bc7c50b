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

#include "fsband/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "fsband/error.hpp"
#include "fsband/parallel.hpp"
#include "fsband/rng.hpp"
#include "json.hpp"

namespace fsband {

const char* to_string(BackgroundKind kind) {
  switch (kind) {
    case BackgroundKind::kLinearGradient: return "linear-gradient";
    case BackgroundKind::kRadialGradient: return "radial-gradient";
    case BackgroundKind::kLowFreqNoise: return "low-freq-noise";
    case BackgroundKind::kTexture: return "texture";
  }
  return "unknown";
}

BackgroundKind parse_background_kind(const std::string& name) {
  for (auto k : {BackgroundKind::kLinearGradient, BackgroundKind::kRadialGradient,
                 BackgroundKind::kLowFreqNoise, BackgroundKind::kTexture}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::kUnknownKind, "unknown background kind '" + name + "'");
}

bool is_smooth(BackgroundKind kind) noexcept {
  return kind != BackgroundKind::kTexture;
}

namespace {

struct Range {
  double lo;
  double hi;
};

// Contrast in [0.15, 0.6], centred somewhere that keeps the range in [0,1].
Range draw_range(Rng& rng) {
  const double contrast = rng.uniform(0.15, 0.6);
  const double mid = rng.uniform(0.05 + contrast / 2, 0.95 - contrast / 2);
  return {mid - contrast / 2, mid + contrast / 2};
}

void rescale_to(std::vector<double>& v, Range r) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double lo = *mn;
  const double span = *mx - *mn;
  for (double& x : v) {
    const double t = span > 0.0 ? (x - lo) / span : 0.0;
    x = std::clamp(r.lo + (r.hi - r.lo) * t, 0.0, 1.0);
  }
}

std::vector<double> radial_gradient(int w, int h, Rng& rng) {
  const double cx = rng.uniform(-0.25, 1.25) * w;
  const double cy = rng.uniform(-0.25, 1.25) * h;
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      v[static_cast<std::size_t>(r) * w + c] = std::hypot(c - cx, r - cy);
    }
  }
  rescale_to(v, draw_range(rng));
  return v;
}

// Cosine-interpolated lattice of random values: smooth, a few undulations
// per plane.
std::vector<double> low_freq_noise(int w, int h, Rng& rng) {
  const int cells = 2 + static_cast<int>(rng.below(3));
  const int lattice = cells + 1;
  std::vector<double> knots(static_cast<std::size_t>(lattice) * lattice);
  for (double& k : knots) k = rng.uniform();
  const auto smooth = [](double t) { return 0.5 - 0.5 * std::cos(std::numbers::pi * t); };
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    const double fy = (h > 1 ? static_cast<double>(r) / (h - 1) : 0.0) * cells;
    const int y0 = std::min(static_cast<int>(fy), cells - 1);
    const double ty = smooth(fy - y0);
    for (int c = 0; c < w; ++c) {
      const double fx = (w > 1 ? static_cast<double>(c) / (w - 1) : 0.0) * cells;
      const int x0 = std::min(static_cast<int>(fx), cells - 1);
      const double tx = smooth(fx - x0);
      const auto k = [&](int y, int x) { return knots[static_cast<std::size_t>(y) * lattice + x]; };
      const double top = k(y0, x0) * (1 - tx) + k(y0, x0 + 1) * tx;
      const double bot = k(y0 + 1, x0) * (1 - tx) + k(y0 + 1, x0 + 1) * tx;
      v[static_cast<std::size_t>(r) * w + c] = top * (1 - ty) + bot * ty;
    }
  }
  rescale_to(v, draw_range(rng));
  return v;
}

// Fine-grained field: either lightly correlated noise or a short-period
// grating with noise, on top of a mild ramp.
std::vector<double> texture(int w, int h, Rng& rng) {
  const double base = rng.uniform(0.25, 0.75);
  const double amplitude = rng.uniform(0.04, 0.15);
  const double tilt = rng.uniform(-0.1, 0.1);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const bool grating = rng.uniform() < 0.5;
  const double period = rng.uniform(2.5, 8.0);

  std::vector<double> noise(static_cast<std::size_t>(w) * h);
  for (double& n : noise) n = rng.normal();
  std::vector<double> v(noise.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      int cnt = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int rr = reflect_index(r + dy, h);
          const int cc = reflect_index(c + dx, w);
          const double wgt = (dx == 0 && dy == 0) ? 2.0 : 1.0;
          acc += wgt * noise[static_cast<std::size_t>(rr) * w + cc];
          cnt += static_cast<int>(wgt);
        }
      }
      const double corr = acc / std::sqrt(static_cast<double>(cnt + 3));
      const double u = (c * std::cos(angle) + r * std::sin(angle));
      double value = base + tilt * (static_cast<double>(c) / std::max(1, w - 1) - 0.5);
      if (grating) {
        value += amplitude * (std::sin(2.0 * std::numbers::pi * u / period) + 0.3 * corr);
      } else {
        value += amplitude * corr;
      }
      v[static_cast<std::size_t>(r) * w + c] = std::clamp(value, 0.0, 1.0);
    }
  }
  return v;
}

std::size_t distinct_count(std::span<const double> v) {
  return std::set<double>(v.begin(), v.end()).size();
}

void check_bits(int bits) {
  if (bits < kMinBandingBits || bits > kMaxBandingBits) {
    throw Error(ErrorCode::kInvalidArgument,
                "banding bits must be in [2, 7], got " + std::to_string(bits));
  }
}

}  // namespace

std::vector<double> linear_gradient(int width, int height, double lo,
                                    double hi, double angle) {
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  double pmin = 0.0;
  double pmax = 0.0;
  for (double x : {0.0, static_cast<double>(width - 1)}) {
    for (double y : {0.0, static_cast<double>(height - 1)}) {
      const double p = x * ca + y * sa;
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
  }
  const double span = pmax - pmin;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double t = span > 0.0 ? (c * ca + r * sa - pmin) / span : 0.0;
      v[static_cast<std::size_t>(r) * width + c] =
          std::clamp(lo + (hi - lo) * t, 0.0, 1.0);
    }
  }
  return v;
}

std::vector<double> gen_background_plane(BackgroundKind kind, int width,
                                         int height, std::uint64_t seed) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "background size must be >= 1");
  }
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case BackgroundKind::kLinearGradient: {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Range r = draw_range(rng);
      return linear_gradient(width, height, r.lo, r.hi, angle);
    }
    case BackgroundKind::kRadialGradient:
      return radial_gradient(width, height, rng);
    case BackgroundKind::kLowFreqNoise:
      return low_freq_noise(width, height, rng);
    case BackgroundKind::kTexture:
      return texture(width, height, rng);
  }
  throw Error(ErrorCode::kUnknownKind, "unknown background kind");
}

Patch gen_background(BackgroundKind kind, int side, std::uint64_t seed) {
  return make_patch(side, gen_background_plane(kind, side, side, seed));
}

Image gen_background_image(BackgroundKind kind, int width, int height,
                           std::uint64_t seed) {
  return Image(width, height, gen_background_plane(kind, width, height, seed));
}

std::vector<double> quantize_levels(std::span<const double> values, int bits) {
  check_bits(bits);
  const double levels = static_cast<double>((1 << bits) - 1);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::round(std::clamp(values[i], 0.0, 1.0) * levels) / levels;
  }
  return out;
}

Patch apply_banding(const Patch& patch, int bits) {
  return Patch{patch.side, patch.origin, quantize_levels(patch.data, bits)};
}

Image apply_banding(const Image& image, int bits) {
  return Image(image.width(), image.height(), quantize_levels(image.pixels(), bits));
}

std::vector<double> dither_to_8bit(std::span<const double> values,
                                   std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xd17e));
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double tri = rng.uniform() + rng.uniform() - 1.0;
    const double q = std::round(values[i] * 255.0 + tri);
    out[i] = std::clamp(q, 0.0, 255.0) / 255.0;
  }
  return out;
}

std::vector<double> round_to_8bit(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::round(std::clamp(values[i], 0.0, 1.0) * 255.0) / 255.0;
  }
  return out;
}

void SynthConfig::validate() const {
  if (count_per_class < 1) {
    throw Error(ErrorCode::kInvalidArgument, "count per class must be >= 1");
  }
  if (side < kMinPatchSide) {
    throw Error(ErrorCode::kInvalidArgument, "patch side must be >= 8");
  }
  if (bits.empty()) throw Error(ErrorCode::kInvalidArgument, "no banding bit depths");
  for (int b : bits) check_bits(b);
  if (std::none_of(kinds.begin(), kinds.end(), is_smooth)) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least one smooth background kind is required");
  }
}

std::size_t DatasetManifest::count(int label) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(),
      [label](const ManifestRecord& r) { return r.label == label; }));
}

std::vector<int> Corpus::labels() const {
  std::vector<int> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) out.push_back(r.label);
  return out;
}

Patch regenerate(const ManifestRecord& record, int side) {
  const BackgroundKind kind = parse_background_kind(record.kind);
  if (record.label != 0) {
    if (!is_smooth(kind)) {
      throw Error(ErrorCode::kInvalidArgument, "banded records need a smooth kind");
    }
    // Redraw until the quantized patch shows at least one band boundary.
    constexpr int kMaxAttempts = 64;
    std::vector<double> banded;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const std::uint64_t s =
          attempt == 0 ? record.seed : mix_seed(record.seed, 0xa77e0000ULL + attempt);
      banded = quantize_levels(gen_background_plane(kind, side, side, s), record.bits);
      if (distinct_count(banded) >= 2) break;
    }
    return make_patch(side, std::move(banded));
  }
  const std::vector<double> bg = gen_background_plane(kind, side, side, record.seed);
  if (record.dither && is_smooth(kind)) {
    return make_patch(side, dither_to_8bit(bg, record.seed));
  }
  return make_patch(side, round_to_8bit(bg));
}

Corpus gen_dataset(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<BackgroundKind> smooth;
  bool with_texture = false;
  for (BackgroundKind k : cfg.kinds) {
    if (is_smooth(k)) {
      if (std::find(smooth.begin(), smooth.end(), k) == smooth.end()) smooth.push_back(k);
    } else {
      with_texture = true;
    }
  }

  Corpus corpus;
  const std::size_t n = static_cast<std::size_t>(cfg.count_per_class);
  corpus.manifest.records.reserve(2 * n);
  char id[32];
  for (std::size_t i = 0; i < n; ++i) {
    ManifestRecord pos;
    std::snprintf(id, sizeof(id), "pos-%06zu", i);
    pos.id = id;
    pos.label = 1;
    pos.kind = to_string(smooth[i % smooth.size()]);
    pos.bits = cfg.bits[(i / smooth.size()) % cfg.bits.size()];
    pos.seed = mix_seed(cfg.seed, 2 * i + 1);
    corpus.manifest.records.push_back(pos);

    ManifestRecord neg;
    std::snprintf(id, sizeof(id), "neg-%06zu", i);
    neg.id = id;
    neg.label = 0;
    const bool tex = with_texture && i % 3 == 2;
    neg.kind = tex ? to_string(BackgroundKind::kTexture)
                   : to_string(smooth[(i - i / 3) % smooth.size()]);
    neg.bits = kNegativeBits;
    neg.seed = mix_seed(cfg.seed, 2 * i);
    neg.dither = !tex && cfg.dither_negatives;
    corpus.manifest.records.push_back(neg);
  }
  corpus.patches.resize(corpus.manifest.records.size());
  parallel_for(corpus.patches.size(), cfg.jobs, [&](std::size_t i) {
    corpus.patches[i] = regenerate(corpus.manifest.records[i], cfg.side);
  });
  return corpus;
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest", path.string());
  for (const auto& r : manifest.records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["kind"] = r.kind;
    j["bits"] = r.bits;
    j["seed"] = r.seed;
    j["path"] = r.path;
    j["dither"] = r.dither;
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "short write", path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such manifest", path.string());
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest", path.string());
  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestRecord r;
      r.id = j.at("id").get<std::string>();
      r.label = j.at("label").get<int>();
      if (r.label != 0 && r.label != 1) {
        throw Error(ErrorCode::kCorruptData, "label must be 0 or 1", where);
      }
      r.kind = j.value("kind", std::string("external"));
      r.bits = j.value("bits", 0);
      r.seed = j.value("seed", std::uint64_t{0});
      r.path = j.value("path", std::string());
      r.dither = j.value("dither", r.label == 0 && r.kind != "texture");
      manifest.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptData, e.what(), where);
    }
  }
  return manifest;
}

void write_dataset(Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "patches", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory", dir.string());
  for (std::size_t i = 0; i < corpus.patches.size(); ++i) {
    auto& rec = corpus.manifest.records[i];
    rec.path = "patches/" + rec.id + ".pgm";
    const Patch& p = corpus.patches[i];
    save_pgm(dir / rec.path, Image(p.side, p.side, p.data), 65535);
  }
  write_manifest(corpus.manifest, dir / "manifest.jsonl");
}

std::vector<Patch> load_corpus_patches(const DatasetManifest& manifest,
                                       const std::filesystem::path& base_dir,
                                       int side) {
  std::vector<Patch> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) {
    if (r.path.empty()) {
      out.push_back(regenerate(r, side));
      continue;
    }
    std::filesystem::path p = r.path;
    if (p.is_relative()) p = base_dir / p;
    const Image img = load_image(p);
    if (img.width() != side || img.height() != side) {
      throw Error(ErrorCode::kShapeMismatch,
                  "patch is " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()) + ", expected side " +
                      std::to_string(side),
                  p.string());
    }
    out.push_back(make_patch(side, std::vector<double>(img.pixels().begin(),
                                                       img.pixels().end())));
  }
  return out;
}

}  // namespace fsband
