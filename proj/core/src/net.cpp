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

#include "fsband/net.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "fsband/error.hpp"
#include "fsband/parallel.hpp"
#include "fsband/rng.hpp"

namespace fsband {

void NetConfig::validate() const {
  if (branch_channels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "branch_channels is empty");
  }
  for (int c : branch_channels) {
    if (c < 1) {
      throw Error(ErrorCode::kInvalidArgument, "channel counts must be >= 1");
    }
  }
  if (early_tap_channels != branch_channels.front()) {
    throw Error(ErrorCode::kInvalidArgument,
                "early_tap_channels must equal the first stage width");
  }
  if (fused_dim != kFusedDim) {
    throw Error(ErrorCode::kInvalidArgument, "fused_dim is fixed at 128");
  }
  if (input_side < 1) {
    throw Error(ErrorCode::kInvalidArgument, "input_side must be >= 1");
  }
}

int feature_dim(const NetConfig& cfg) {
  const int per_branch = cfg.branch_channels.front() + cfg.branch_channels.back();
  return per_branch * (cfg.dual_branch ? 2 : 1);
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

constexpr int kKernel = 3;
constexpr int kTaps = kKernel * kKernel;

int stage_out_side(int in_side) { return (in_side + 1) / 2; }

template <typename T>
void he_uniform(Tensor<T>& out, std::size_t n, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  out.resize(n);
  for (auto& w : out) w = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
BranchParams<T> init_branch(const NetConfig& cfg, Rng& rng) {
  BranchParams<T> p;
  int in_c = 1;
  for (int out_c : cfg.branch_channels) {
    p.weights.emplace_back();
    he_uniform(p.weights.back(), static_cast<std::size_t>(out_c) * in_c * kTaps,
               in_c * kTaps, rng);
    p.biases.emplace_back(static_cast<std::size_t>(out_c), T(0));
    in_c = out_c;
  }
  return p;
}

// Per-branch activations kept for the backward pass.
template <typename T>
struct BranchTrace {
  std::vector<int> in_side;
  std::vector<Tensor<T>> cols;  // [stage] (cin*9) x (out_side^2)
  std::vector<Tensor<T>> acts;  // [stage] cout x out_side^2, post-ReLU
};

// Stride-2, zero-padded 3x3 patch matrix; row index = c*9 + ky*3 + kx.
template <typename T>
void im2col(const T* in, int channels, int side, Tensor<T>& col) {
  const int out = stage_out_side(side);
  const std::size_t cols = static_cast<std::size_t>(out) * out;
  col.assign(static_cast<std::size_t>(channels) * kTaps * cols, T(0));
  for (int c = 0; c < channels; ++c) {
    const T* plane = in + static_cast<std::size_t>(c) * side * side;
    for (int ky = 0; ky < kKernel; ++ky) {
      for (int kx = 0; kx < kKernel; ++kx) {
        T* dst = col.data() + (static_cast<std::size_t>(c) * kTaps + ky * kKernel + kx) * cols;
        for (int oy = 0; oy < out; ++oy) {
          const int iy = 2 * oy - 1 + ky;
          if (iy < 0 || iy >= side) continue;
          const T* src = plane + static_cast<std::size_t>(iy) * side;
          T* drow = dst + static_cast<std::size_t>(oy) * out;
          for (int ox = 0; ox < out; ++ox) {
            const int ix = 2 * ox - 1 + kx;
            if (ix >= 0 && ix < side) drow[ox] = src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, int channels, int side, T* in) {
  const int out = stage_out_side(side);
  const std::size_t cols = static_cast<std::size_t>(out) * out;
  for (int c = 0; c < channels; ++c) {
    T* plane = in + static_cast<std::size_t>(c) * side * side;
    for (int ky = 0; ky < kKernel; ++ky) {
      for (int kx = 0; kx < kKernel; ++kx) {
        const T* src = col + (static_cast<std::size_t>(c) * kTaps + ky * kKernel + kx) * cols;
        for (int oy = 0; oy < out; ++oy) {
          const int iy = 2 * oy - 1 + ky;
          if (iy < 0 || iy >= side) continue;
          T* drow = plane + static_cast<std::size_t>(iy) * side;
          const T* srow = src + static_cast<std::size_t>(oy) * out;
          for (int ox = 0; ox < out; ++ox) {
            const int ix = 2 * ox - 1 + kx;
            if (ix >= 0 && ix < side) drow[ix] += srow[ox];
          }
        }
      }
    }
  }
}

// Runs one branch and appends [early GAP, late GAP] to `features`.
template <typename T>
void branch_forward(const BranchParams<T>& p, const NetConfig& cfg,
                    std::span<const T> input, BranchTrace<T>& trace,
                    T* features) {
  const std::size_t stages = cfg.branch_channels.size();
  trace.in_side.resize(stages);
  trace.cols.resize(stages);
  trace.acts.resize(stages);
  int side = cfg.input_side;
  int in_c = 1;
  const T* in = input.data();
  for (std::size_t s = 0; s < stages; ++s) {
    const int out_c = cfg.branch_channels[s];
    const int out = stage_out_side(side);
    const Eigen::Index npix = static_cast<Eigen::Index>(out) * out;
    trace.in_side[s] = side;
    im2col(in, in_c, side, trace.cols[s]);
    trace.acts[s].resize(static_cast<std::size_t>(out_c) * npix);
    Eigen::Map<const RowMat<T>> w(p.weights[s].data(), out_c, in_c * kTaps);
    Eigen::Map<const RowMat<T>> col(trace.cols[s].data(), in_c * kTaps, npix);
    Eigen::Map<const Vec<T>> b(p.biases[s].data(), out_c);
    Eigen::Map<RowMat<T>> act(trace.acts[s].data(), out_c, npix);
    act.noalias() = w * col;
    act.colwise() += b;
    act = act.cwiseMax(T(0));
    in = trace.acts[s].data();
    in_c = out_c;
    side = out;
  }
  const auto pooled = [&](std::size_t s, T* dst) {
    const int channels = cfg.branch_channels[s];
    const Eigen::Index npix =
        static_cast<Eigen::Index>(trace.acts[s].size() / channels);
    Eigen::Map<const RowMat<T>> act(trace.acts[s].data(), channels, npix);
    Eigen::Map<Vec<T>>(dst, channels) = act.rowwise().mean();
  };
  pooled(0, features);
  pooled(stages - 1, features + cfg.branch_channels.front());
}

// `feature_grad` is [early, late] for this branch.
template <typename T>
void branch_backward(const BranchParams<T>& p, const NetConfig& cfg,
                     const BranchTrace<T>& trace, const T* feature_grad,
                     BranchParams<T>& grad, std::vector<T>* input_grad) {
  const std::size_t stages = cfg.branch_channels.size();
  Tensor<T> d_act;
  {
    const int c_last = cfg.branch_channels.back();
    const std::size_t npix = trace.acts.back().size() / c_last;
    d_act.assign(trace.acts.back().size(), T(0));
    const T* late = feature_grad + cfg.branch_channels.front();
    for (int c = 0; c < c_last; ++c) {
      const T g = late[c] / static_cast<T>(npix);
      std::fill_n(d_act.begin() + static_cast<std::ptrdiff_t>(c * npix), npix, g);
    }
  }
  Tensor<T> d_col;
  for (std::size_t si = stages; si-- > 0;) {
    const int out_c = cfg.branch_channels[si];
    const int in_c = si == 0 ? 1 : cfg.branch_channels[si - 1];
    const Eigen::Index npix =
        static_cast<Eigen::Index>(trace.acts[si].size() / out_c);
    if (si == 0) {
      for (int c = 0; c < out_c; ++c) {
        const T g = feature_grad[c] / static_cast<T>(npix);
        T* row = d_act.data() + static_cast<std::size_t>(c) * npix;
        for (Eigen::Index i = 0; i < npix; ++i) row[i] += g;
      }
    }
    const T* act = trace.acts[si].data();
    for (std::size_t i = 0; i < d_act.size(); ++i) {
      if (!(act[i] > T(0))) d_act[i] = T(0);
    }
    Eigen::Map<const RowMat<T>> d_pre(d_act.data(), out_c, npix);
    Eigen::Map<const RowMat<T>> col(trace.cols[si].data(), in_c * kTaps, npix);
    Eigen::Map<RowMat<T>> dw(grad.weights[si].data(), out_c, in_c * kTaps);
    Eigen::Map<Vec<T>> db(grad.biases[si].data(), out_c);
    dw.noalias() = d_pre * col.transpose();
    db = d_pre.rowwise().sum();

    if (si == 0 && input_grad == nullptr) break;
    Eigen::Map<const RowMat<T>> w(p.weights[si].data(), out_c, in_c * kTaps);
    d_col.resize(static_cast<std::size_t>(in_c) * kTaps * npix);
    Eigen::Map<RowMat<T>> dcol(d_col.data(), in_c * kTaps, npix);
    dcol.noalias() = w.transpose() * d_pre;
    const int side = trace.in_side[si];
    Tensor<T> d_in(static_cast<std::size_t>(in_c) * side * side, T(0));
    col2im_add(d_col.data(), in_c, side, d_in.data());
    if (si == 0) {
      input_grad->assign(d_in.begin(), d_in.end());
    } else {
      d_act = std::move(d_in);
    }
  }
}

template <typename T>
void check_input(const NetConfig& cfg, std::span<const T> x, const char* which) {
  if (x.size() != static_cast<std::size_t>(cfg.input_side) * cfg.input_side) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("input '") + which + "' has " +
                    std::to_string(x.size()) + " values, model expects " +
                    std::to_string(cfg.input_side) + "^2");
  }
}

template <typename T>
struct ForwardState {
  BranchTrace<T> hf;
  BranchTrace<T> lf;
  Vec<T> features;
  Vec<T> hidden;  // post-ReLU
  T logit = T(0);
  T prob = T(0);
};

template <typename T>
void run_forward(const BasicModel<T>& m, std::span<const T> a,
                 std::span<const T> b, ForwardState<T>& st) {
  const NetConfig& cfg = m.config;
  check_input(cfg, a, "a");
  if (cfg.dual_branch) check_input(cfg, b, "b");
  const int fdim = feature_dim(cfg);
  const int per_branch = cfg.branch_channels.front() + cfg.branch_channels.back();
  st.features.resize(fdim);
  branch_forward(m.branch_hf, cfg, a, st.hf, st.features.data());
  if (cfg.dual_branch) {
    branch_forward(m.branch_lf, cfg, b, st.lf, st.features.data() + per_branch);
  }
  Eigen::Map<const RowMat<T>> w1(m.head.fc1_weight.data(), cfg.fused_dim, fdim);
  Eigen::Map<const Vec<T>> b1(m.head.fc1_bias.data(), cfg.fused_dim);
  st.hidden = (w1 * st.features + b1).cwiseMax(T(0));
  Eigen::Map<const Vec<T>> w2(m.head.fc2_weight.data(), cfg.fused_dim);
  st.logit = w2.dot(st.hidden) + m.head.fc2_bias[0];
  st.prob = T(1) / (T(1) + std::exp(-st.logit));
}

}  // namespace

template <typename T>
BasicModel<T> init_model_as(const NetConfig& cfg) {
  cfg.validate();
  BasicModel<T> m;
  m.config = cfg;
  Rng hf_rng(mix_seed(cfg.seed, 1));
  m.branch_hf = init_branch<T>(cfg, hf_rng);
  if (cfg.dual_branch) {
    Rng lf_rng(mix_seed(cfg.seed, 2));
    m.branch_lf = init_branch<T>(cfg, lf_rng);
  }
  Rng head_rng(mix_seed(cfg.seed, 3));
  const int fdim = feature_dim(cfg);
  he_uniform(m.head.fc1_weight, static_cast<std::size_t>(cfg.fused_dim) * fdim,
             fdim, head_rng);
  m.head.fc1_bias.assign(static_cast<std::size_t>(cfg.fused_dim), T(0));
  m.head.fc2_weight.assign(static_cast<std::size_t>(cfg.fused_dim), T(0));
  m.head.fc2_bias.assign(1, T(0));
  return m;
}

Model init_model(const NetConfig& cfg) { return init_model_as<float>(cfg); }

template <typename T>
BasicModel<T> zeros_like(const BasicModel<T>& model) {
  BasicModel<T> z = model;
  z.for_each_tensor([](Tensor<T>& t) { std::fill(t.begin(), t.end(), T(0)); });
  return z;
}

template <typename T, typename U>
BasicModel<T> cast_model(const BasicModel<U>& model) {
  BasicModel<T> out;
  out.config = model.config;
  std::vector<const Tensor<U>*> src;
  model.for_each_tensor([&](const Tensor<U>& t) { src.push_back(&t); });
  out.branch_hf.weights.resize(model.branch_hf.weights.size());
  out.branch_hf.biases.resize(model.branch_hf.biases.size());
  out.branch_lf.weights.resize(model.branch_lf.weights.size());
  out.branch_lf.biases.resize(model.branch_lf.biases.size());
  std::size_t k = 0;
  out.for_each_tensor([&](Tensor<T>& t) {
    t.assign(src[k]->begin(), src[k]->end());
    ++k;
  });
  return out;
}

template <typename T>
T forward(const BasicModel<T>& model, std::span<const T> a,
          std::span<const T> b) {
  ForwardState<T> st;
  run_forward(model, a, b, st);
  return st.prob;
}

float forward(const Model& model, const HFMap& hf, const LFMap& lf) {
  const Sample s = make_sample(hf, lf, 0);
  return forward<float>(model, s.a, s.b);
}

double bce_loss(double p, int y) {
  const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y != 0 ? -std::log(q) : -std::log(1.0 - q);
}

template <typename T>
T forward_backward(const BasicModel<T>& model, std::span<const T> a,
                   std::span<const T> b, int label, BasicModel<T>& grad,
                   InputGradients<T>* input_grad) {
  const NetConfig& cfg = model.config;
  ForwardState<T> st;
  run_forward(model, a, b, st);

  const int fdim = feature_dim(cfg);
  const T d_logit = st.prob - static_cast<T>(label != 0 ? 1 : 0);
  Eigen::Map<Vec<T>>(grad.head.fc2_weight.data(), cfg.fused_dim) =
      d_logit * st.hidden;
  grad.head.fc2_bias[0] = d_logit;

  Eigen::Map<const Vec<T>> w2(model.head.fc2_weight.data(), cfg.fused_dim);
  Vec<T> d_hidden = d_logit * w2;
  for (Eigen::Index i = 0; i < d_hidden.size(); ++i) {
    if (!(st.hidden[i] > T(0))) d_hidden[i] = T(0);
  }
  Eigen::Map<RowMat<T>>(grad.head.fc1_weight.data(), cfg.fused_dim, fdim)
      .noalias() = d_hidden * st.features.transpose();
  Eigen::Map<Vec<T>>(grad.head.fc1_bias.data(), cfg.fused_dim) = d_hidden;
  Eigen::Map<const RowMat<T>> w1(model.head.fc1_weight.data(), cfg.fused_dim, fdim);
  const Vec<T> d_features = w1.transpose() * d_hidden;

  const int per_branch = cfg.branch_channels.front() + cfg.branch_channels.back();
  branch_backward(model.branch_hf, cfg, st.hf, d_features.data(), grad.branch_hf,
                  input_grad != nullptr ? &input_grad->a : nullptr);
  if (cfg.dual_branch) {
    branch_backward(model.branch_lf, cfg, st.lf, d_features.data() + per_branch,
                    grad.branch_lf,
                    input_grad != nullptr ? &input_grad->b : nullptr);
  }
  return static_cast<T>(bce_loss(static_cast<double>(st.prob), label));
}

Sample make_sample(const HFMap& hf, const LFMap& lf, int label) {
  if (hf.side != lf.side) {
    throw Error(ErrorCode::kShapeMismatch, "HFM and LFM sides differ");
  }
  Sample s;
  s.a.assign(hf.data.begin(), hf.data.end());
  s.b.assign(lf.data.begin(), lf.data.end());
  s.label = label;
  return s;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size < 1 || epochs < 0 ||
      !(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "train config requires learning_rate > 0, batch_size >= 1, "
                "epochs >= 0 and 0 < split_ratio < 1");
  }
}

DataSplit split_dataset(std::size_t n, double ratio, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix_seed(seed, 0x5711));
  rng.shuffle(order.begin(), order.end());
  std::size_t n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  DataSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, n)));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, n)), order.end());
  return split;
}

namespace {

void require_both_labels(std::span<const Sample> data,
                         std::span<const std::size_t> idx, const char* what) {
  bool pos = false;
  bool neg = false;
  for (std::size_t i : idx) {
    (data[i].label != 0 ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error(ErrorCode::kDegenerateDataset,
                std::string(what) + " contains a single label");
  }
}

std::span<const float> second_input(const Model& m, const Sample& s) {
  return m.config.dual_branch ? std::span<const float>(s.b)
                              : std::span<const float>();
}

class Adam {
 public:
  Adam(const Model& model, const TrainConfig& cfg)
      : cfg_(cfg), m_(zeros_like(model)), v_(zeros_like(model)) {}

  void step(Model& model, const Model& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, t_);
    const float b1 = static_cast<float>(cfg_.adam_beta1);
    const float b2 = static_cast<float>(cfg_.adam_beta2);
    const float lr = static_cast<float>(cfg_.learning_rate / c1);
    const float inv_c2 = static_cast<float>(1.0 / c2);
    const float eps = static_cast<float>(cfg_.adam_epsilon);
    std::vector<Tensor<float>*> params, ms, vs;
    std::vector<const Tensor<float>*> gs;
    model.for_each_tensor([&](Tensor<float>& t) { params.push_back(&t); });
    m_.for_each_tensor([&](Tensor<float>& t) { ms.push_back(&t); });
    v_.for_each_tensor([&](Tensor<float>& t) { vs.push_back(&t); });
    grad.for_each_tensor([&](const Tensor<float>& t) { gs.push_back(&t); });
    for (std::size_t k = 0; k < params.size(); ++k) {
      float* p = params[k]->data();
      float* m = ms[k]->data();
      float* v = vs[k]->data();
      const float* g = gs[k]->data();
      for (std::size_t i = 0; i < params[k]->size(); ++i) {
        m[i] = b1 * m[i] + (1.0f - b1) * g[i];
        v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
        p[i] -= lr * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
      }
    }
  }

 private:
  TrainConfig cfg_;
  Model m_;
  Model v_;
  int t_ = 0;
};

void add_into(Model& total, const Model& g) {
  std::vector<Tensor<float>*> dst;
  total.for_each_tensor([&](Tensor<float>& t) { dst.push_back(&t); });
  std::size_t k = 0;
  g.for_each_tensor([&](const Tensor<float>& t) {
    float* d = dst[k++]->data();
    for (std::size_t i = 0; i < t.size(); ++i) d[i] += t[i];
  });
}

void scale(Model& m, float s) {
  m.for_each_tensor([&](Tensor<float>& t) {
    for (float& x : t) x *= s;
  });
}

double accuracy_at_half(std::span<const double> scores,
                        std::span<const int> labels) {
  if (scores.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int pred = scores[i] >= 0.5 ? 1 : 0;
    if (pred == (labels[i] != 0 ? 1 : 0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::vector<Sample> gather(std::span<const Sample> data,
                           std::span<const std::size_t> idx) {
  std::vector<Sample> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(data[i]);
  return out;
}

}  // namespace

std::vector<double> predict(const Model& model, std::span<const Sample> data,
                            int jobs) {
  std::vector<double> out(data.size());
  parallel_for(data.size(), jobs, [&](std::size_t i) {
    out[i] = forward<float>(model, data[i].a, second_input(model, data[i]));
  });
  return out;
}

double batch_loss(const Model& model, std::span<const Sample> data, int jobs) {
  if (data.empty()) return 0.0;
  const std::vector<double> p = predict(model, data, jobs);
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) sum += bce_loss(p[i], data[i].label);
  return sum / static_cast<double>(data.size());
}

std::pair<Model, TrainReport> train(Model model, std::span<const Sample> data,
                                    const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) {
    throw Error(ErrorCode::kDegenerateDataset, "dataset is empty");
  }
  return train(std::move(model), data,
               split_dataset(data.size(), cfg.split_ratio, cfg.seed), cfg);
}

std::pair<Model, TrainReport> train(Model model, std::span<const Sample> data,
                                    const DataSplit& split,
                                    const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty() || split.train.empty()) {
    throw Error(ErrorCode::kDegenerateDataset, "dataset is empty");
  }
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  require_both_labels(data, all, "dataset");
  require_both_labels(data, split.train, "training split");

  const std::vector<Sample> test_set = gather(data, split.test);
  TrainReport report;
  report.split = split;
  for (const Sample& s : test_set) report.test_labels.push_back(s.label);

  const auto evaluate_heldout = [&]() {
    report.test_scores = predict(model, test_set, cfg.jobs);
    report.heldout_accuracy.push_back(
        accuracy_at_half(report.test_scores, report.test_labels));
  };
  {
    const std::vector<Sample> train_set = gather(data, split.train);
    report.epoch_loss.push_back(batch_loss(model, train_set, cfg.jobs));
  }
  evaluate_heldout();

  Adam adam(model, cfg);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const bool threaded = resolve_jobs(cfg.jobs) > 1;
  std::vector<Model> slots(threaded ? batch : 1, zeros_like(model));
  std::vector<double> slot_loss(batch, 0.0);
  Model total = zeros_like(model);
  std::vector<std::size_t> order = split.train;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(mix_seed(cfg.seed, 0xe90c0000ULL + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      scale(total, 0.0f);
      if (!threaded) {
        for (std::size_t j = 0; j < count; ++j) {
          const Sample& s = data[order[start + j]];
          loss_sum += forward_backward<float>(model, s.a, second_input(model, s),
                                              s.label, slots[0]);
          add_into(total, slots[0]);
        }
      } else {
        parallel_for(count, cfg.jobs, [&](std::size_t j) {
          const Sample& s = data[order[start + j]];
          slot_loss[j] = forward_backward<float>(
              model, s.a, second_input(model, s), s.label, slots[j]);
        });
        for (std::size_t j = 0; j < count; ++j) {
          loss_sum += slot_loss[j];
          add_into(total, slots[j]);
        }
      }
      scale(total, 1.0f / static_cast<float>(count));
      adam.step(model, total);
    }
    report.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
    evaluate_heldout();
  }
  return {std::move(model), std::move(report)};
}

template BasicModel<float> init_model_as<float>(const NetConfig&);
template BasicModel<double> init_model_as<double>(const NetConfig&);
template BasicModel<float> zeros_like(const BasicModel<float>&);
template BasicModel<double> zeros_like(const BasicModel<double>&);
template BasicModel<double> cast_model(const BasicModel<float>&);
template BasicModel<float> cast_model(const BasicModel<double>&);
template float forward(const BasicModel<float>&, std::span<const float>,
                       std::span<const float>);
template double forward(const BasicModel<double>&, std::span<const double>,
                        std::span<const double>);
template float forward_backward(const BasicModel<float>&, std::span<const float>,
                                std::span<const float>, int, BasicModel<float>&,
                                InputGradients<float>*);
template double forward_backward(const BasicModel<double>&,
                                 std::span<const double>,
                                 std::span<const double>, int,
                                 BasicModel<double>&, InputGradients<double>*);

}  // namespace fsband
