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

// Dual-branch convolutional patch classifier.
//
// Each branch is a stack of 3x3 stride-2 convolutions with ReLU. The
// global-average-pooled outputs of the first and the last stage form the
// branch feature; the two branch features are concatenated and passed
// through FC(fused_dim) + ReLU and a single sigmoid unit. The branches never
// share storage.

#ifndef FSBAND_NET_HPP_
#define FSBAND_NET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsband/freqmaps.hpp"

namespace fsband {

inline constexpr int kFusedDim = 128;

struct NetConfig {
  std::vector<int> branch_channels{16, 32, 64, 128};
  int early_tap_channels = 16;  // must equal branch_channels.front()
  int fused_dim = kFusedDim;
  int input_side = kDefaultPatchSide;
  bool dual_branch = true;  // false: a single branch fed with one input
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

// 64-byte aligned storage for parameters and activations. Vectorized
// reductions split their work by pointer alignment, so a fixed alignment
// keeps results bit-identical from run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  friend bool operator==(const AlignedAllocator&, const AlignedAllocator&) { return true; }
};

template <typename T>
using Tensor = std::vector<T, AlignedAllocator<T>>;

template <typename T>
struct BranchParams {
  std::vector<Tensor<T>> weights;  // [stage] cout x cin x 3 x 3
  std::vector<Tensor<T>> biases;    // [stage] cout
  friend bool operator==(const BranchParams&, const BranchParams&) = default;
};

template <typename T>
struct HeadParams {
  Tensor<T> fc1_weight;  // fused_dim x feature_dim
  Tensor<T> fc1_bias;
  Tensor<T> fc2_weight;  // 1 x fused_dim
  Tensor<T> fc2_bias;    // 1
  friend bool operator==(const HeadParams&, const HeadParams&) = default;
};

template <typename T>
struct BasicModel {
  NetConfig config;
  BranchParams<T> branch_hf;
  BranchParams<T> branch_lf;  // empty when !config.dual_branch
  HeadParams<T> head;

  // Visits every tensor in declaration order: hf stages (weight, bias),
  // lf stages, fc1 weight, fc1 bias, fc2 weight, fc2 bias.
  template <typename F>
  void for_each_tensor(F&& fn) {
    visit(*this, fn);
  }
  template <typename F>
  void for_each_tensor(F&& fn) const {
    visit(*this, fn);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const Tensor<T>& t) { n += t.size(); });
    return n;
  }

  friend bool operator==(const BasicModel&, const BasicModel&) = default;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& fn) {
    for (std::size_t s = 0; s < self.branch_hf.weights.size(); ++s) {
      fn(self.branch_hf.weights[s]);
      fn(self.branch_hf.biases[s]);
    }
    for (std::size_t s = 0; s < self.branch_lf.weights.size(); ++s) {
      fn(self.branch_lf.weights[s]);
      fn(self.branch_lf.biases[s]);
    }
    fn(self.head.fc1_weight);
    fn(self.head.fc1_bias);
    fn(self.head.fc2_weight);
    fn(self.head.fc2_bias);
  }
};

using Model = BasicModel<float>;

// Width of the concatenated feature vector fed to the head.
int feature_dim(const NetConfig& cfg);

// Deterministic He-uniform initialization of the convolutions and the first
// fully-connected layer from `cfg.seed`; the branches use independent RNG
// streams. The output unit starts at zero, so a fresh model predicts 0.5.
template <typename T>
BasicModel<T> init_model_as(const NetConfig& cfg);
Model init_model(const NetConfig& cfg);

// Same layout, every value zero.
template <typename T>
BasicModel<T> zeros_like(const BasicModel<T>& model);

template <typename T, typename U>
BasicModel<T> cast_model(const BasicModel<U>& model);

// Probability that the inputs come from a banded patch. `b` is ignored by
// single-branch models. Throws kShapeMismatch when an input is not
// input_side^2.
template <typename T>
T forward(const BasicModel<T>& model, std::span<const T> a,
          std::span<const T> b);
float forward(const Model& model, const HFMap& hf, const LFMap& lf);

// Optional gradients with respect to the two inputs.
template <typename T>
struct InputGradients {
  std::vector<T> a;
  std::vector<T> b;
};

// Binary cross-entropy of one example plus its parameter gradients, written
// (not accumulated) into `grad`, which must have the model's layout.
template <typename T>
T forward_backward(const BasicModel<T>& model, std::span<const T> a,
                   std::span<const T> b, int label, BasicModel<T>& grad,
                   InputGradients<T>* input_grad = nullptr);

inline constexpr double kProbabilityClamp = 1e-7;

// -[y log p + (1 - y) log(1 - p)] with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int y);

// One training example: the two branch inputs (input_side^2 each) and the
// label. For single-branch models `b` may be empty.
struct Sample {
  std::vector<float> a;
  std::vector<float> b;
  int label = 0;
};

Sample make_sample(const HFMap& hf, const LFMap& lf, int label);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 10;
  double split_ratio = 0.8;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int jobs = 1;  // results are identical for every job count

  void validate() const;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Random split with round(ratio * n) training records, clamped so both sides
// are non-empty.
DataSplit split_dataset(std::size_t n, double ratio, std::uint64_t seed);

struct TrainReport {
  // Index 0 holds the mean training loss before the first update; index e
  // the mean per-example loss seen during epoch e.
  std::vector<double> epoch_loss;
  // Held-out accuracy at threshold 0.5, same indexing as epoch_loss.
  std::vector<double> heldout_accuracy;
  DataSplit split;
  std::vector<double> test_scores;  // final model, aligned with split.test
  std::vector<int> test_labels;

  double final_accuracy() const {
    return heldout_accuracy.empty() ? 0.0 : heldout_accuracy.back();
  }
  friend bool operator==(const TrainReport& x, const TrainReport& y) {
    return x.epoch_loss == y.epoch_loss &&
           x.heldout_accuracy == y.heldout_accuracy &&
           x.split.train == y.split.train && x.split.test == y.split.test &&
           x.test_scores == y.test_scores && x.test_labels == y.test_labels;
  }
};

// Adam on mini-batches of the mean BCE loss. Throws kDegenerateDataset when
// the dataset or its training split lacks one of the labels.
std::pair<Model, TrainReport> train(Model model, std::span<const Sample> data,
                                    const TrainConfig& cfg);
std::pair<Model, TrainReport> train(Model model, std::span<const Sample> data,
                                    const DataSplit& split,
                                    const TrainConfig& cfg);

std::vector<double> predict(const Model& model, std::span<const Sample> data,
                            int jobs = 1);

// Mean BCE of a batch (no reweighting).
double batch_loss(const Model& model, std::span<const Sample> data,
                  int jobs = 1);

// ---------------------------------------------------------------------------
// Weights file: "FSBD", u16 version, NetConfig, float32 LE tensors in
// declaration order, CRC32 of everything before it.

inline constexpr std::uint16_t kModelFormatVersion = 1;

std::vector<unsigned char> serialize_model(const Model& model);
Model deserialize_model(std::span<const unsigned char> bytes,
                        const std::string& origin = {});
void save_model(const Model& model, const std::filesystem::path& path);
// Throws kFileNotFound/kIo, kCorruptData (bad magic or layout),
// kVersionMismatch, kChecksumMismatch.
Model load_model(const std::filesystem::path& path);

}  // namespace fsband

#endif  // FSBAND_NET_HPP_
