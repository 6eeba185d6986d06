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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "segmark/model/model.h"
#include "segmark/text/rng.h"

namespace segmark::gradcheck {

// Small shapes keep central differences cheap.
inline model::ModelConfig tiny_config(bool gate_internal) {
  model::ModelConfig c;
  c.embed_dim = 4;
  c.hidden = 3;
  c.hash_buckets = 11;
  c.mask.hidden = 6;
  c.mask.heads = 4;  // head_dim 2, concat 8: exercises the uneven split
  c.gate_internal = gate_internal;
  return c;
}

inline model::ModelParams random_params(const model::ModelConfig& c, text::Rng& rng) {
  model::ModelParams p = model::ModelParams::init(c, rng.next_u64());
  // Non-zero biases and transitions so every term is exercised.
  for (auto& v : p.dense.views()) {
    if (v.name.find(".b_") != std::string::npos || v.name == "crf.transitions") {
      for (std::size_t k = 0; k < v.size; ++k) v.data[k] = rng.uniform(-0.5, 0.5);
    }
  }
  return p;
}

inline model::Example random_example(const model::ModelConfig& c, text::Rng& rng,
                                     std::size_t max_len = 6) {
  model::Example ex;
  const std::size_t n = 1 + rng.uniform_index(max_len);
  ex.styles.resize(static_cast<Eigen::Index>(n), c.mask.style_dim);
  for (std::size_t t = 0; t < n; ++t) {
    ex.buckets.push_back(static_cast<std::uint32_t>(rng.uniform_index(c.hash_buckets)));
    for (int f = 0; f < c.mask.style_dim; ++f) {
      ex.styles(static_cast<Eigen::Index>(t), f) = rng.uniform();
    }
    ex.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
  }
  return ex;
}

// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps
// vanishing gradients from turning rounding noise into large ratios.
inline double rel_error(double a, double n, double floor = 1e-6) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

struct GroupErrors {
  std::map<std::string, double> max_error;  // by parameter group label
  std::size_t checked = 0;
};

inline const char* group_label(const std::string& name) {
  if (name.rfind("gru", 0) == 0) return "recurrence";
  if (name == "mask.w_s" || name == "mask.b_s") return "infomask.projection";
  if (name.rfind("mask.", 0) == 0) return "infomask.attention";
  if (name == "crf.transitions") return "crf.transitions";
  return "crf.emissions";
}

// Compares analytic gradients with central differences on every entry of
// every tensor (the tiny shapes make this affordable).
inline void check_instance(const model::ModelParams& base, const model::Example& ex,
                           const model::ForwardOptions& opts, GroupErrors& out,
                           double eps = 1e-5) {
  model::Gradients g = model::Gradients::zeros(base.config);
  model::loss_and_gradients(ex, base, opts, g);
  model::ModelParams p = base;
  const auto probe = [&](double& slot) {
    const double saved = slot;
    slot = saved + eps;
    const double up = model::loss(ex, p, opts);
    slot = saved - eps;
    const double down = model::loss(ex, p, opts);
    slot = saved;
    return (up - down) / (2.0 * eps);
  };

  auto views = p.dense.views();
  const auto analytic = g.dense.const_data();
  for (std::size_t i = 0; i < views.size(); ++i) {
    double& worst = out.max_error[group_label(views[i].name)];
    for (std::size_t k = 0; k < views[i].size; ++k) {
      worst = std::max(worst, rel_error(analytic[i][k], probe(views[i].data[k])));
      ++out.checked;
    }
  }
  double& worst = out.max_error["embedding"];
  for (std::uint32_t row = 0; row < base.config.hash_buckets; ++row) {
    const auto it = g.embedding.find(row);
    for (int c = 0; c < base.config.embed_dim; ++c) {
      const double a = it == g.embedding.end() ? 0.0 : it->second(c);
      worst = std::max(worst, rel_error(a, probe(p.embedding(row, c))));
      ++out.checked;
    }
  }
}

}  // namespace segmark::gradcheck
