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

namespace segmark::evalkit {

// Binary logit log(p / (1 - p)), with p clamped into the open interval so
// saturated marginals stay finite.
double logit_of(double p);

// Mean token NLL of sigmoid(logit / temperature) against labels.
double temperature_nll(const std::vector<double>& logits,
                       const std::vector<int>& labels, double temperature);

struct TemperatureFit {
  double temperature = 1.0;
  double nll_before = 0.0;  // at T = 1
  double nll_after = 0.0;
};

// Golden-section search for the NLL-minimizing temperature on [lo, hi].
// Inputs are probabilities of label 1. Throws std::invalid_argument when the
// labels contain a single class or a probability lies outside [0, 1].
TemperatureFit fit_temperature(const std::vector<double>& probs,
                               const std::vector<int>& labels,
                               double lo = 0.05, double hi = 5.0);

std::vector<double> apply_temperature(const std::vector<double>& probs,
                                      double temperature);

// Top-label expected calibration error: confidence is max(p, 1 - p) and
// accuracy is whether the argmax label matches, pooled in equal-width bins
// over [0, 1].
double ece(const std::vector<double>& probs, const std::vector<int>& labels,
           int bins = 15);

// Mean squared error between p(label = 1) and the label.
double brier(const std::vector<double>& probs, const std::vector<int>& labels);

}  // namespace segmark::evalkit
