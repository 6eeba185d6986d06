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

#include <cstddef>
#include <vector>

#include "segmark/linalg.h"
#include "segmark/stylometry/stylometry.h"

namespace segmark::infomask {

struct InfoMaskConfig {
  int style_dim = 5;
  int hidden = 64;  // d_s
  int heads = 5;

  // Per-head width; when heads does not divide hidden the concatenated heads
  // are wider than hidden and the output projection maps them back.
  int head_dim() const { return (hidden + heads - 1) / heads; }
  int concat_dim() const { return head_dim() * heads; }
};

// Style projection, multi-head self-attention and output projection. Head h
// owns rows [h * head_dim, (h + 1) * head_dim) of w_q, w_k and w_v.
struct InfoMaskParams {
  InfoMaskConfig config;
  Matrix w_s;  // hidden x style_dim
  Vector b_s;
  Matrix w_q, w_k, w_v;  // concat_dim x hidden
  Vector b_q, b_k, b_v;
  Matrix w_o;  // hidden x concat_dim
  Vector b_o;

  static InfoMaskParams zeros(const InfoMaskConfig& config);
  static InfoMaskParams xavier(const InfoMaskConfig& config, text::Rng& rng);

  // Shapes match; used to accumulate gradients.
  InfoMaskParams zeros_like() const { return zeros(config); }
  void add_scaled(const InfoMaskParams& other, double scale);
};

// Intermediates kept for the backward pass and for attribution export.
struct MaskForward {
  Matrix styles;       // T x style_dim
  Matrix pre_relu;     // T x hidden
  Matrix projected;    // V, T x hidden
  Matrix queries, keys, values;  // T x concat_dim
  std::vector<Matrix> weights;   // per head, T x T attention probabilities
  Matrix concat;       // T x concat_dim
  Matrix attended;     // A, T x hidden
  Vector row_sum;      // T
  Vector mask;         // m, T
};

Matrix to_matrix(const stylometry::StyleMatrix& s);

// V = ReLU(S W_s^T + b_s). Throws std::invalid_argument when the feature
// width does not match the parameters.
Matrix project_styles(const Matrix& styles, const InfoMaskParams& params);

// Scaled dot-product self-attention over the rows of V. No positional terms,
// so the map is permutation-equivariant.
Matrix style_attention(const Matrix& projected, const InfoMaskParams& params);

// m_i = sigmoid(sum_j A_ij).
Vector compute_mask(const Matrix& attended);

// Row-wise scaling of encoder states.
Matrix gate(const Matrix& states, const Vector& mask);

MaskForward forward(const Matrix& styles, const InfoMaskParams& params);

// Accumulates dLoss/dparams into `grads` given dLoss/dmask.
void backward(const MaskForward& fwd, const InfoMaskParams& params,
              const Vector& d_mask, InfoMaskParams& grads);

}  // namespace segmark::infomask
