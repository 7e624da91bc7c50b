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

#include "settings.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <functional>

#include "fsband/error.hpp"
#include "json.hpp"

namespace fsband::tools {

using nlohmann::json;

void Settings::sync() {
  detect.lfm = lfm;
  detect.jobs = jobs;
  train.jobs = jobs;
  synth.jobs = jobs;
}

void Settings::set_seed(std::uint64_t seed) {
  net.seed = seed;
  train.seed = seed;
  synth.seed = seed;
}

void Settings::set_patch_side(int side) {
  net.input_side = side;
  synth.side = side;
  detect.patch_side = side;
}

namespace {

using Setter = std::function<void(const json&)>;

class Section {
 public:
  Section(std::string name, std::string origin)
      : name_(std::move(name)), origin_(std::move(origin)) {}

  template <typename T>
  Section& field(const std::string& key, T& target) {
    setters_[key] = [this, key, &target](const json& v) {
      try {
        target = v.get<T>();
      } catch (const json::exception&) {
        fail("wrong type for '" + qualified(key) + "'");
      }
    };
    return *this;
  }

  Section& custom(const std::string& key, Setter fn) {
    setters_[key] = std::move(fn);
    return *this;
  }

  void apply(const json& obj) const {
    if (!obj.is_object()) fail("'" + name_ + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
      const auto it = setters_.find(key);
      if (it == setters_.end()) fail("unknown config key '" + qualified(key) + "'");
      it->second(value);
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kInvalidArgument, msg, origin_);
  }

 private:
  std::string qualified(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  std::string name_;
  std::string origin_;
  std::map<std::string, Setter> setters_;
};

template <typename T, typename Parse>
Setter enum_setter(const Section& sec, T& target, Parse parse) {
  return [&sec, &target, parse](const json& v) {
    if (!v.is_string()) sec.fail("expected a string");
    try {
      target = parse(v.get<std::string>());
    } catch (const Error& e) {
      sec.fail(e.what());
    }
  };
}

}  // namespace

void apply_config_text(Settings& s, const std::string& text,
                       const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad config: ") + e.what(),
                origin);
  }

  Section lfm("lfm", origin);
  lfm.field("alpha", s.lfm.alpha)
      .field("beta", s.lfm.beta)
      .field("iterations", s.lfm.iterations)
      .field("tol", s.lfm.tol)
      .field("edge_width", s.lfm.edge_width);

  Section net("net", origin);
  net.field("branch_channels", s.net.branch_channels)
      .field("dual_branch", s.net.dual_branch)
      .field("seed", s.net.seed);

  Section train("train", origin);
  train.field("learning_rate", s.train.learning_rate)
      .field("batch_size", s.train.batch_size)
      .field("epochs", s.train.epochs)
      .field("split_ratio", s.train.split_ratio)
      .field("seed", s.train.seed)
      .field("adam_beta1", s.train.adam_beta1)
      .field("adam_beta2", s.train.adam_beta2)
      .field("adam_epsilon", s.train.adam_epsilon);

  Section masking("masking", origin);
  masking.field("gamma", s.detect.gamma);

  Section synth("synth", origin);
  synth.field("count_per_class", s.synth.count_per_class)
      .field("bits", s.synth.bits)
      .field("dither_negatives", s.synth.dither_negatives)
      .field("seed", s.synth.seed)
      .custom("kinds", [&](const json& v) {
        if (!v.is_array()) synth.fail("'synth.kinds' must be an array");
        s.synth.kinds.clear();
        for (const auto& k : v) {
          if (!k.is_string()) synth.fail("'synth.kinds' entries must be strings");
          try {
            s.synth.kinds.push_back(parse_background_kind(k.get<std::string>()));
          } catch (const Error& e) {
            synth.fail(e.what());
          }
        }
      });

  Section detect("detect", origin);
  detect.field("label_threshold", s.detect.label_threshold)
      .custom("pad_policy", enum_setter(detect, s.detect.pad_policy, parse_pad_policy))
      .custom("pooling", enum_setter(detect, s.detect.pooling, parse_pooling_mode))
      .custom("freq_scope", enum_setter(detect, s.detect.freq_scope, parse_freq_scope));

  Section top("", origin);
  top.field("jobs", s.jobs)
      .field("pool_fraction", s.detect.pool_fraction)
      .custom("seed", [&](const json& v) {
        if (!v.is_number_unsigned()) top.fail("'seed' must be a nonnegative integer");
        s.set_seed(v.get<std::uint64_t>());
      })
      .custom("patch_side", [&](const json& v) {
        if (!v.is_number_integer()) top.fail("'patch_side' must be an integer");
        s.set_patch_side(v.get<int>());
      })
      .custom("lfm", [&](const json& v) { lfm.apply(v); })
      .custom("net", [&](const json& v) { net.apply(v); })
      .custom("train", [&](const json& v) { train.apply(v); })
      .custom("masking", [&](const json& v) { masking.apply(v); })
      .custom("synth", [&](const json& v) { synth.apply(v); })
      .custom("detect", [&](const json& v) { detect.apply(v); });

  // Top-level scalars first so section values win over the fan-out.
  if (!doc.is_object()) top.fail("config must be a JSON object");
  json scalars = json::object();
  json sections = json::object();
  for (const auto& [key, value] : doc.items()) {
    (value.is_object() ? sections : scalars)[key] = value;
  }
  top.apply(scalars);
  top.apply(sections);
  s.sync();
}

void apply_config_file(Settings& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "no such config file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(s, buf.str(), path.string());
}

std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return std::filesystem::path(*flag);
  if (const char* env = std::getenv("FSBAND_CONFIG"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

}  // namespace fsband::tools
