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

#include "segmark/evalkit/calibration.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segmark::evalkit {

namespace {

constexpr double kProbFloor = 1e-15;

void check_inputs(const std::vector<double>& probs, const std::vector<int>& labels) {
  if (probs.size() != labels.size()) {
    throw std::invalid_argument("calibration: probs and labels differ in length");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("calibration: probability outside [0, 1]");
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("calibration: labels must be 0 or 1");
  }
}

// log sigmoid(x), stable for large |x|.
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

double logit_of(double p) {
  const double q = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
  return std::log(q) - std::log1p(-q);
}

double temperature_nll(const std::vector<double>& logits,
                       const std::vector<int>& labels, double temperature) {
  if (logits.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i] / temperature;
    total -= labels[i] == 1 ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return total / static_cast<double>(logits.size());
}

TemperatureFit fit_temperature(const std::vector<double>& probs,
                               const std::vector<int>& labels, double lo,
                               double hi) {
  check_inputs(probs, labels);
  bool has0 = false, has1 = false;
  for (int y : labels) (y == 1 ? has1 : has0) = true;
  if (!has0 || !has1) {
    throw std::invalid_argument("calibration: labels contain a single class");
  }
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("calibration: bad bracket");
  std::vector<double> logits(probs.size());
  std::transform(probs.begin(), probs.end(), logits.begin(), logit_of);
  const auto f = [&](double t) { return temperature_nll(logits, labels, t); };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-9; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  TemperatureFit fit;
  fit.temperature = 0.5 * (a + b);
  fit.nll_before = f(1.0);
  fit.nll_after = f(fit.temperature);
  // The bracket ends are candidates too; golden section only sees the interior.
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe < fit.nll_after) {
      fit.temperature = edge;
      fit.nll_after = fe;
    }
  }
  return fit;
}

std::vector<double> apply_temperature(const std::vector<double>& probs,
                                      double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-logit_of(probs[i]) / temperature));
  }
  return out;
}

double ece(const std::vector<double>& probs, const std::vector<int>& labels, int bins) {
  check_inputs(probs, labels);
  if (bins < 1) throw std::invalid_argument("ece: bins must be positive");
  if (probs.empty()) return 0.0;
  std::vector<double> conf_sum(bins, 0.0), acc_sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int pred = probs[i] >= 0.5 ? 1 : 0;
    const double conf = pred == 1 ? probs[i] : 1.0 - probs[i];
    int b = static_cast<int>(conf * bins);
    b = std::clamp(b, 0, bins - 1);
    conf_sum[b] += conf;
    acc_sum[b] += pred == labels[i] ? 1.0 : 0.0;
    ++count[b];
  }
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    total += std::fabs(acc_sum[b] - conf_sum[b]);
  }
  return total / static_cast<double>(probs.size());
}

double brier(const std::vector<double>& probs, const std::vector<int>& labels) {
  check_inputs(probs, labels);
  if (probs.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double e = probs[i] - labels[i];
    total += e * e;
  }
  return total / static_cast<double>(probs.size());
}

}  // namespace segmark::evalkit
