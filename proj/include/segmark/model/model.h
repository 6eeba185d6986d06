// Copyright 2026 The segmark Authors
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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "segmark/corpus/corpus.h"
#include "segmark/infomask/infomask.h"
#include "segmark/linalg.h"
#include "segmark/model/crf.h"
#include "segmark/stylometry/stylometry.h"

namespace segmark::model {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ModelConfig {
  int num_labels = 2;
  int embed_dim = 64;
  int hidden = 32;  // per direction; encoder width is 2 * hidden
  std::uint32_t hash_buckets = 1u << 16;
  infomask::InfoMaskConfig mask;
  // false ablates the Info-Mask: the gate is fixed at 1.
  bool use_infomask = true;
  // Gate the recurrence input instead of the final encoder output.
  bool gate_internal = false;
  int max_seq_len = 512;
  int chunk_overlap = 64;

  int enc_dim() const { return 2 * hidden; }
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

// One direction of a gated recurrent unit:
//   r = sig(W_r x + U_r h + b_r), u = sig(W_u x + U_u h + b_u)
//   n = tanh(W_n x + U_n (r * h) + b_n), h' = (1 - u) * n + u * h
struct GruParams {
  Matrix w_r, w_u, w_n;  // hidden x input
  Matrix u_r, u_u, u_n;  // hidden x hidden
  Vector b_r, b_u, b_n;

  static GruParams zeros(int input, int hidden);
};

// Layer groups, ordered from input to output, used for the learning-rate
// ladder.
enum class ParamGroup { kEmbedding = 0, kRecurrence = 1, kInfoMask = 2, kCrf = 3 };
inline constexpr int kNumParamGroups = 4;

// Everything except the embedding table.
struct DenseParams {
  GruParams fwd;
  GruParams bwd;
  infomask::InfoMaskParams mask;
  CrfParams crf;

  static DenseParams zeros(const ModelConfig& config);

  struct View {
    std::string name;
    ParamGroup group;
    double* data;
    std::size_t size;
  };
  std::vector<View> views();
  std::vector<const double*> const_data() const;
};

struct ModelParams {
  ModelConfig config;
  RowMatrix embedding;  // hash_buckets x embed_dim
  DenseParams dense;

  // Xavier-uniform weights, zero biases and transitions.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);
  static ModelParams zeros(const ModelConfig& config);

  std::size_t parameter_count() const;
  bool all_finite() const;
};

// Gradients keep only the embedding rows a batch touched.
struct Gradients {
  std::map<std::uint32_t, Vector> embedding;
  DenseParams dense;
  double loss = 0.0;

  static Gradients zeros(const ModelConfig& config);
  void add(const Gradients& other);
  void scale(double s);
  double norm() const;
};

std::uint32_t bucket_of(std::string_view token, std::uint32_t buckets);
std::vector<std::uint32_t> bucket_ids(const corpus::Document& doc,
                                      std::uint32_t buckets);

// Model input for one (possibly chunked) sequence.
struct Example {
  std::vector<std::uint32_t> buckets;
  Matrix styles;            // T x 5
  std::vector<int> labels;  // empty at inference
};

// Inference-time input edit used by the faithfulness protocol.
struct InputPerturbation {
  enum class Mode { kZero, kShuffle };
  Mode mode = Mode::kZero;
  std::vector<std::size_t> positions;
  // Shuffle: position[i] takes the inputs of source[i].
  std::vector<std::size_t> source;
};

struct ForwardOptions {
  double dropout = 0.0;
  std::uint64_t dropout_seed = 0;
  const InputPerturbation* perturbation = nullptr;
  // Replaces the computed mask with ones (used by tests and ablations).
  bool force_unit_mask = false;
};

struct GruTrace {
  Matrix h_prev, r, u, n, h;  // T x hidden, in processing order
};

// All activations of one forward pass.
struct ForwardPass {
  Matrix inputs;        // T x embed_dim after any perturbation
  Matrix styles;        // T x 5 after any perturbation
  Matrix rnn_inputs;    // inputs, gated when gate_internal
  GruTrace fwd;
  GruTrace bwd;         // rows in reverse time order
  Matrix states;        // z, T x enc_dim
  Matrix gated;         // z~
  Matrix dropout_mask;  // scaled keep mask, empty when dropout is off
  Matrix emissions;     // T x L
  bool has_mask = false;
  infomask::MaskForward mask;
  Vector gate;          // m, ones when the mask is ablated
};

ForwardPass forward(const Example& ex, const ModelParams& params,
                    const ForwardOptions& opts = {});

// Gated encoder states z~ for a sequence (no dropout).
Matrix encode(const Example& ex, const ModelParams& params);

// CRF negative log-likelihood of ex.labels and its gradient with respect to
// every parameter. Returns the loss; `grads` is accumulated into.
double loss_and_gradients(const Example& ex, const ModelParams& params,
                          const ForwardOptions& opts, Gradients& grads);

// Loss only, for finite-difference checks.
double loss(const Example& ex, const ModelParams& params,
            const ForwardOptions& opts = {});

struct SequenceOutput {
  std::vector<int> labels;
  Matrix marginals;  // T x L
  Vector gate;
  Vector row_sum;    // sum_j A_ij, zeros when the mask is ablated
};

SequenceOutput decode(const Example& ex, const ModelParams& params,
                      const InputPerturbation* perturbation = nullptr);

// Chunk boundaries [lo, hi) covering [0, n) with max_seq_len windows that
// overlap by chunk_overlap.
std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(
    std::size_t n, const ModelConfig& config);

Example slice(const Example& ex, std::size_t lo, std::size_t hi);

}  // namespace segmark::model
