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

#include "segmark/model/crf.h"

#include <stdexcept>

namespace segmark::model {
namespace {

void check_inputs(const Matrix& emissions, const Matrix& transitions) {
  const Eigen::Index l = emissions.cols();
  if (transitions.rows() != l + 2 || transitions.cols() != l + 2) {
    throw std::invalid_argument("crf: transition matrix must be (L+2)x(L+2)");
  }
  if (!emissions.allFinite()) {
    throw std::invalid_argument("crf: non-finite emissions");
  }
}

struct Lattice {
  Matrix alpha;  // T x L, log forward scores including emission at t
  Matrix beta;   // T x L, log backward scores excluding emission at t
  double log_z = 0.0;
};

Lattice run_forward_backward(const Matrix& o, const Matrix& tr) {
  const Eigen::Index n = o.rows();
  const Eigen::Index l = o.cols();
  const Eigen::Index start = l;
  const Eigen::Index end = l + 1;
  Lattice lat;
  lat.alpha.resize(n, l);
  lat.beta.resize(n, l);
  for (Eigen::Index y = 0; y < l; ++y) lat.alpha(0, y) = tr(start, y) + o(0, y);
  for (Eigen::Index t = 1; t < n; ++t) {
    for (Eigen::Index y = 0; y < l; ++y) {
      double acc = -INFINITY;
      for (Eigen::Index p = 0; p < l; ++p) {
        acc = log_sum_exp(acc, lat.alpha(t - 1, p) + tr(p, y));
      }
      lat.alpha(t, y) = acc + o(t, y);
    }
  }
  for (Eigen::Index y = 0; y < l; ++y) lat.beta(n - 1, y) = tr(y, end);
  for (Eigen::Index t = n - 1; t-- > 0;) {
    for (Eigen::Index y = 0; y < l; ++y) {
      double acc = -INFINITY;
      for (Eigen::Index nx = 0; nx < l; ++nx) {
        acc = log_sum_exp(acc, tr(y, nx) + o(t + 1, nx) + lat.beta(t + 1, nx));
      }
      lat.beta(t, y) = acc;
    }
  }
  double z = -INFINITY;
  for (Eigen::Index y = 0; y < l; ++y) {
    z = log_sum_exp(z, lat.alpha(n - 1, y) + lat.beta(n - 1, y));
  }
  lat.log_z = z;
  return lat;
}

}  // namespace

CrfParams CrfParams::zeros(int num_labels, int input_dim) {
  CrfParams p;
  p.w_c = Matrix::Zero(num_labels, input_dim);
  p.b_c = Vector::Zero(num_labels);
  p.transitions = Matrix::Zero(num_labels + 2, num_labels + 2);
  return p;
}

double crf_score(const Matrix& emissions, const std::vector<int>& labels,
                 const Matrix& transitions) {
  check_inputs(emissions, transitions);
  const Eigen::Index n = emissions.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument("crf: label sequence length mismatch");
  }
  const Eigen::Index start = emissions.cols();
  const Eigen::Index end = start + 1;
  if (n == 0) return transitions(start, end);
  double s = transitions(start, labels[0]);
  for (Eigen::Index t = 0; t < n; ++t) {
    s += emissions(t, labels[static_cast<std::size_t>(t)]);
    if (t + 1 < n) {
      s += transitions(labels[static_cast<std::size_t>(t)],
                       labels[static_cast<std::size_t>(t + 1)]);
    }
  }
  return s + transitions(labels.back(), end);
}

double log_partition(const Matrix& emissions, const Matrix& transitions) {
  check_inputs(emissions, transitions);
  if (emissions.rows() == 0) {
    return transitions(emissions.cols(), emissions.cols() + 1);
  }
  return run_forward_backward(emissions, transitions).log_z;
}

double crf_nll(const Matrix& emissions, const std::vector<int>& labels,
               const Matrix& transitions) {
  const double s = crf_score(emissions, labels, transitions);
  return log_partition(emissions, transitions) - s;
}

CrfGradients crf_nll_with_gradients(const Matrix& emissions,
                                    const std::vector<int>& labels,
                                    const Matrix& transitions) {
  const double s = crf_score(emissions, labels, transitions);
  const Eigen::Index n = emissions.rows();
  const Eigen::Index l = emissions.cols();
  CrfGradients g;
  g.d_emissions = Matrix::Zero(n, l);
  g.d_transitions = Matrix::Zero(l + 2, l + 2);
  g.marginals = Matrix::Zero(n, l);
  if (n == 0) return g;

  const Lattice lat = run_forward_backward(emissions, transitions);
  g.loss = lat.log_z - s;
  const Eigen::Index start = l;
  const Eigen::Index end = l + 1;
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index y = 0; y < l; ++y) {
      g.marginals(t, y) = std::exp(lat.alpha(t, y) + lat.beta(t, y) - lat.log_z);
    }
  }
  g.d_emissions = g.marginals;
  for (Eigen::Index y = 0; y < l; ++y) {
    g.d_transitions(start, y) += g.marginals(0, y);
    g.d_transitions(y, end) += g.marginals(n - 1, y);
  }
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    for (Eigen::Index a = 0; a < l; ++a) {
      for (Eigen::Index b = 0; b < l; ++b) {
        g.d_transitions(a, b) += std::exp(lat.alpha(t, a) + transitions(a, b) +
                                          emissions(t + 1, b) +
                                          lat.beta(t + 1, b) - lat.log_z);
      }
    }
  }
  // Subtract the observed path.
  g.d_transitions(start, labels.front()) -= 1.0;
  g.d_transitions(labels.back(), end) -= 1.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const int y = labels[static_cast<std::size_t>(t)];
    g.d_emissions(t, y) -= 1.0;
    if (t + 1 < n) g.d_transitions(y, labels[static_cast<std::size_t>(t + 1)]) -= 1.0;
  }
  return g;
}

Matrix crf_marginals(const Matrix& emissions, const Matrix& transitions) {
  check_inputs(emissions, transitions);
  const Eigen::Index n = emissions.rows();
  const Eigen::Index l = emissions.cols();
  Matrix m = Matrix::Zero(n, l);
  if (n == 0) return m;
  const Lattice lat = run_forward_backward(emissions, transitions);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index y = 0; y < l; ++y) {
      m(t, y) = std::exp(lat.alpha(t, y) + lat.beta(t, y) - lat.log_z);
    }
  }
  return m;
}

std::vector<int> viterbi(const Matrix& emissions, const Matrix& transitions) {
  check_inputs(emissions, transitions);
  const Eigen::Index n = emissions.rows();
  const Eigen::Index l = emissions.cols();
  std::vector<int> path(static_cast<std::size_t>(n));
  if (n == 0) return path;
  const Eigen::Index start = l;
  const Eigen::Index end = l + 1;

  // Best suffix scores: best(t, y) = max over y_{t+1..T} of the score from
  // position t onward given y_t = y, excluding the emission at t. Decoding
  // left to right and taking the first maximizer at each step yields the
  // lexicographically smallest optimal sequence.
  Matrix best(n, l);
  for (Eigen::Index y = 0; y < l; ++y) best(n - 1, y) = transitions(y, end);
  for (Eigen::Index t = n - 1; t-- > 0;) {
    for (Eigen::Index y = 0; y < l; ++y) {
      double m = -INFINITY;
      for (Eigen::Index nx = 0; nx < l; ++nx) {
        m = std::max(m, transitions(y, nx) + emissions(t + 1, nx) +
                            best(t + 1, nx));
      }
      best(t, y) = m;
    }
  }
  Eigen::Index prev = start;
  for (Eigen::Index t = 0; t < n; ++t) {
    Eigen::Index arg = 0;
    double m = -INFINITY;
    for (Eigen::Index y = 0; y < l; ++y) {
      const double v = transitions(prev, y) + emissions(t, y) + best(t, y);
      if (v > m) {
        m = v;
        arg = y;
      }
    }
    path[static_cast<std::size_t>(t)] = static_cast<int>(arg);
    prev = arg;
  }
  return path;
}

}  // namespace segmark::model
