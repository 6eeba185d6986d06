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

#include <vector>

#include "segmark/linalg.h"

namespace segmark::model {

// Linear-chain CRF over L labels. Transition matrix is (L+2) x (L+2): index L
// is the start state and L+1 the end state. Only start->label,
// label->label and label->end entries take part in scoring; the rest are
// unreachable and ignored.
struct CrfParams {
  Matrix w_c;          // L x d_enc emission weights
  Vector b_c;          // L
  Matrix transitions;  // (L+2) x (L+2), row = from, column = to

  int num_labels() const { return static_cast<int>(b_c.size()); }
  int start_state() const { return num_labels(); }
  int end_state() const { return num_labels() + 1; }

  static CrfParams zeros(int num_labels, int input_dim);
};

// s(O, y): start->y_1, consecutive transitions, y_T->end, plus emissions.
double crf_score(const Matrix& emissions, const std::vector<int>& labels,
                 const Matrix& transitions);

// log sum_y exp s(O, y) by the forward recursion in log space.
double log_partition(const Matrix& emissions, const Matrix& transitions);

// -(s(O,y) - log Z). Throws std::invalid_argument for non-finite emissions or
// a label sequence of the wrong length.
double crf_nll(const Matrix& emissions, const std::vector<int>& labels,
               const Matrix& transitions);

struct CrfGradients {
  double loss = 0.0;
  Matrix d_emissions;    // T x L
  Matrix d_transitions;  // (L+2) x (L+2)
  Matrix marginals;      // T x L posterior label marginals
};

// NLL together with its gradients; d_emissions = marginals - one_hot(y).
CrfGradients crf_nll_with_gradients(const Matrix& emissions,
                                    const std::vector<int>& labels,
                                    const Matrix& transitions);

// Posterior marginals p(y_t = l | O) via forward-backward; rows sum to 1.
Matrix crf_marginals(const Matrix& emissions, const Matrix& transitions);

// argmax_y s(O, y). Among equal-scoring sequences the lexicographically
// smallest wins, which favors label 0 at the earliest differing position.
std::vector<int> viterbi(const Matrix& emissions, const Matrix& transitions);

}  // namespace segmark::model
