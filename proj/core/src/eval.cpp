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

#include "fsband/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fsband/error.hpp"
#include "json.hpp"

namespace fsband {

void ScoredSet::validate() const {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "scores and labels differ in length");
  }
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "scored set is empty");
}

std::size_t ScoredSet::positives() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));
}

namespace {

struct Group {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

// Score groups in descending score order.
std::vector<Group> descending_groups(const ScoredSet& s) {
  s.validate();
  const std::size_t n = s.scores.size();
  const std::size_t p = s.positives();
  if (p == 0 || p == n) {
    throw Error(ErrorCode::kSingleClass, "ranking metrics need both classes");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] > s.scores[b];
  });
  std::vector<Group> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || s.scores[order[i]] != s.scores[order[i - 1]]) groups.emplace_back();
    if (s.labels[order[i]] != 0) {
      ++groups.back().pos;
    } else {
      ++groups.back().neg;
    }
  }
  return groups;
}

}  // namespace

double auroc(const ScoredSet& s) {
  const std::vector<Group> groups = descending_groups(s);
  const double p = static_cast<double>(s.positives());
  const double n = static_cast<double>(s.scores.size()) - p;
  double tp = 0.0;
  double fp = 0.0;
  double area = 0.0;
  for (const Group& g : groups) {
    const double tp2 = tp + static_cast<double>(g.pos);
    const double fp2 = fp + static_cast<double>(g.neg);
    area += (fp2 - fp) * (tp + tp2) / 2.0;
    tp = tp2;
    fp = fp2;
  }
  return area / (p * n);
}

double auprc(const ScoredSet& s) {
  const std::vector<Group> groups = descending_groups(s);
  const double p = static_cast<double>(s.positives());
  double tp = 0.0;
  double fp = 0.0;
  double area = 0.0;
  for (const Group& g : groups) {
    tp += static_cast<double>(g.pos);
    fp += static_cast<double>(g.neg);
    if (g.pos > 0) area += (static_cast<double>(g.pos) / p) * (tp / (tp + fp));
  }
  return area;
}

double accuracy_at(const ScoredSet& s, double threshold, bool positive_above) {
  s.validate();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool above = s.scores[i] >= threshold;
    const bool pred = positive_above ? above : !above;
    if (pred == (s.labels[i] != 0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(s.scores.size());
}

ThresholdResult best_threshold_accuracy(const ScoredSet& s) {
  s.validate();
  const std::size_t n = s.scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] < s.scores[b];
  });
  const std::size_t total_pos = s.positives();

  // Sweep thresholds upward. `pos_below`/`neg_below` count records strictly
  // under the current threshold.
  const double lo = s.scores[order.front()];
  const double hi = s.scores[order.back()];
  const double pad = std::max(1.0, std::abs(hi - lo));
  ThresholdResult best{lo - pad, -1.0, true};
  std::size_t pos_below = 0;
  std::size_t neg_below = 0;
  const auto consider = [&](double thr) {
    // score >= thr => positive: correct = pos above + neg below.
    const std::size_t up = (total_pos - pos_below) + neg_below;
    const std::size_t down = n - up;
    const double acc_up = static_cast<double>(up) / static_cast<double>(n);
    const double acc_down = static_cast<double>(down) / static_cast<double>(n);
    if (acc_up > best.accuracy) best = {thr, acc_up, true};
    if (acc_down > best.accuracy) best = {thr, acc_down, false};
  };
  consider(lo - pad);
  std::size_t i = 0;
  while (i < n) {
    const double v = s.scores[order[i]];
    while (i < n && s.scores[order[i]] == v) {
      if (s.labels[order[i]] != 0) {
        ++pos_below;
      } else {
        ++neg_below;
      }
      ++i;
    }
    const double next = i < n ? 0.5 * (v + s.scores[order[i]]) : hi + pad;
    consider(next);
  }
  return best;
}

ThresholdResult bisection_threshold_accuracy(const ScoredSet& s, int steps,
                                             std::vector<double>* probed) {
  s.validate();
  const auto [mn, mx] = std::minmax_element(s.scores.begin(), s.scores.end());
  double lo = *mn;
  double hi = *mx;
  ThresholdResult best{lo, -1.0, true};
  const auto probe = [&](double thr) {
    if (probed != nullptr) probed->push_back(thr);
    ThresholdResult r{thr, accuracy_at(s, thr, true), true};
    const double down = accuracy_at(s, thr, false);
    if (down > r.accuracy) r = {thr, down, false};
    if (r.accuracy > best.accuracy) best = r;
    return r.accuracy;
  };
  probe(0.5 * (lo + hi));
  for (int k = 0; k < steps && hi > lo; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double left = probe(0.5 * (lo + mid));
    const double right = probe(0.5 * (mid + hi));
    if (left >= right) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return best;
}

EvalReport evaluate(std::string name, const ScoredSet& s,
                    double seconds_per_patch) {
  EvalReport r;
  r.name = std::move(name);
  r.auroc = auroc(s);
  r.auprc = auprc(s);
  const ThresholdResult t = best_threshold_accuracy(s);
  r.accuracy = t.accuracy;
  r.threshold = t.threshold;
  r.positive_above = t.positive_above;
  r.seconds_per_patch = seconds_per_patch;
  return r;
}

SpeedReport benchmark_speed(const Model& model, std::span<const Patch> patches,
                            int repetitions, const LfmConfig& lfm_cfg) {
  if (patches.size() < 10) {
    throw Error(ErrorCode::kInvalidArgument, "speed benchmark needs >= 10 patches");
  }
  if (repetitions < 3) {
    throw Error(ErrorCode::kInvalidArgument, "speed benchmark needs >= 3 repetitions");
  }
  double sink = 0.0;
  const auto pass = [&] {
    for (const Patch& p : patches) {
      sink += forward(model, hfm(p), lfm(p, lfm_cfg));
    }
  };
  pass();
  SpeedReport rep;
  rep.patches = patches.size();
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    pass();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    rep.rep_seconds.push_back(dt.count() / static_cast<double>(patches.size()));
  }
  std::vector<double> sorted = rep.rep_seconds;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  rep.seconds_per_patch =
      m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  if (!std::isfinite(sink)) rep.seconds_per_patch = 0.0;
  return rep;
}

void write_reports_csv(const std::filesystem::path& path,
                       std::span<const EvalReport> reports) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write report", path.string());
  out << "name,auroc,auprc,accuracy,threshold,positive_above,seconds_per_patch\n";
  char buf[256];
  for (const EvalReport& r : reports) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.9g,%d,%.9g\n",
                  r.name.c_str(), r.auroc, r.auprc, r.accuracy, r.threshold,
                  r.positive_above ? 1 : 0, r.seconds_per_patch);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::kIo, "short write", path.string());
}

void write_reports_json(const std::filesystem::path& path,
                        std::span<const EvalReport> reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const EvalReport& r : reports) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["auroc"] = r.auroc;
    j["auprc"] = r.auprc;
    j["accuracy"] = r.accuracy;
    j["threshold"] = r.threshold;
    j["positive_above"] = r.positive_above;
    j["seconds_per_patch"] = r.seconds_per_patch;
    arr.push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write report", path.string());
  out << arr.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "short write", path.string());
}

std::string format_reports(std::span<const EvalReport> reports) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s %8s %8s %9s %12s\n", "name", "auroc",
                "auprc", "accuracy", "s/patch");
  os << buf;
  for (const EvalReport& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-10s %8.4f %8.4f %9.4f %12.3g\n",
                  r.name.c_str(), r.auroc, r.auprc, r.accuracy, r.seconds_per_patch);
    os << buf;
  }
  return os.str();
}

ScoredSet read_score_csv(const std::filesystem::path& path,
                         const DatasetManifest& manifest) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such score file", path.string());
  }
  std::unordered_map<std::string, int> label_of;
  for (const auto& r : manifest.records) label_of[r.id] = r.label;

  std::ifstream in(path);
  ScoredSet s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kCorruptData, "expected 'id,score'", where);
    }
    const std::string id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      if (line_no == 1 && s.scores.empty()) continue;  // header
      throw Error(ErrorCode::kCorruptData, "bad score '" + value + "'", where);
    }
    const auto it = label_of.find(id);
    if (it == label_of.end()) {
      throw Error(ErrorCode::kCorruptData, "id '" + id + "' not in manifest", where);
    }
    s.scores.push_back(score);
    s.labels.push_back(it->second);
  }
  return s;
}

}  // namespace fsband
