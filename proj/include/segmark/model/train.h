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

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "segmark/corpus/corpus.h"
#include "segmark/model/segmenter.h"

namespace segmark::model {

struct TrainConfig {
  int batch_size = 64;
  int epochs = 5;
  double weight_decay = 0.01;
  double grad_clip = 1.0;
  double dropout_start = 0.1;
  double dropout_end = 0.3;
  double warmup_fraction = 0.1;
  int patience = 2;
  // Base rates for the embedding, recurrence, Info-Mask and CRF groups.
  std::array<double, kNumParamGroups> lr_ladder = {1e-6, 5e-6, 1e-5, 1e-4};
  // Each group is further scaled by layer_decay^(depth from the output).
  double layer_decay = 0.95;
  // Uniform multiplier on the whole ladder.
  double lr_scale = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // Stylometric language model.
  int lm_order = 3;
  double lm_smoothing = 0.1;
  stylometry::StyleConfig style;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
  double group_lr(ParamGroup g) const;
  double dropout_at(int epoch) const;
};

nlohmann::json to_json(const TrainConfig& c);

// Learning-rate multiplier for 0-based `step`: linear warmup to 1, then
// cosine annealing towards 0 at `total`.
double schedule_factor(std::size_t step, std::size_t total, double warmup_fraction);

// Scales `grads` so its global norm is at most `max_norm`. Returns the norm
// before clipping.
double clip_gradients(Gradients& grads, double max_norm);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean per-document loss over the epoch
  double probe_loss = 0.0;  // dropout-free loss on a fixed training subset
  double valid_sbda = 0.0;  // SBDA@0.3
  double dropout = 0.0;
  double max_grad_norm = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  double initial_probe_loss = 0.0;
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_valid_sbda = 0.0;
  std::size_t steps = 0;
  bool early_stopped = false;

  nlohmann::json to_json() const;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// AdamW with decoupled weight decay over the four parameter groups.
class AdamW {
 public:
  AdamW(const ModelParams& params, const TrainConfig& cfg);
  // `lr_factor` multiplies every group's rate for this step.
  void step(ModelParams& params, const Gradients& grads, double lr_factor);
  std::size_t steps() const { return t_; }

 private:
  const TrainConfig cfg_;
  std::size_t t_ = 0;
  RowMatrix m_emb_, v_emb_;
  std::vector<Vector> m_, v_;
};

struct TrainResult {
  Segmenter model;
  TrainLog log;
};

using ProgressFn = std::function<void(const EpochStats&)>;

// Fits the style extractor on the training documents, initializes the model
// from the seed and trains with early stopping on validation SBDA@0.3. The
// returned parameters are those of the best epoch.
TrainResult train(const std::vector<corpus::Document>& train_docs,
                  const std::vector<corpus::Document>& valid_docs,
                  const ModelConfig& model_config, const TrainConfig& cfg,
                  const ProgressFn& progress = {});

// SBDA@0.3 of `model` on `docs` (Viterbi decoding).
double validation_sbda(const Segmenter& model, const std::vector<Example>& docs);

}  // namespace segmark::model
