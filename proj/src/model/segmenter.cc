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

#include "segmark/model/segmenter.h"

#include <algorithm>
#include <stdexcept>

#include "segmark/evalkit/calibration.h"
#include "segmark/infomask/infomask.h"

namespace segmark::model {

Example featurize(const corpus::Document& doc,
                  const stylometry::StyleExtractor& style,
                  const ModelConfig& config) {
  Example ex;
  ex.buckets = bucket_ids(doc, config.hash_buckets);
  ex.styles = infomask::to_matrix(stylometry::build_style_matrix(doc, style));
  ex.labels = doc.labels;
  return ex;
}

Prediction Segmenter::predict(const corpus::Document& doc,
                              const InputPerturbation* perturbation) const {
  return predict(featurize(doc), perturbation);
}

namespace {

// Shuffling moves whole input rows, which is the same as moving the bucket
// ids and style rows, so it can be resolved before chunking.
Example resolve_shuffle(const Example& ex, const InputPerturbation& pert) {
  if (pert.positions.size() != pert.source.size()) {
    throw std::invalid_argument("shuffle perturbation needs one source per position");
  }
  Example out = ex;
  for (std::size_t i = 0; i < pert.positions.size(); ++i) {
    const std::size_t to = pert.positions[i];
    const std::size_t from = pert.source[i];
    if (to >= ex.buckets.size() || from >= ex.buckets.size()) {
      throw std::out_of_range("perturbation position outside the document");
    }
    out.buckets[to] = ex.buckets[from];
    out.styles.row(static_cast<Eigen::Index>(to)) =
        ex.styles.row(static_cast<Eigen::Index>(from));
  }
  return out;
}

}  // namespace

Prediction Segmenter::predict(const Example& input,
                              const InputPerturbation* perturbation) const {
  const ModelConfig& cfg = params.config;
  const bool zeroing = perturbation && perturbation->mode == InputPerturbation::Mode::kZero;
  const Example ex = perturbation && !zeroing ? resolve_shuffle(input, *perturbation) : input;
  const std::size_t n = ex.buckets.size();
  Prediction out;
  if (n == 0) return out;

  std::vector<int> votes(n, 0), seen(n, 0);
  std::vector<double> p1(n, 0.0), mask(n, 0.0), axm(n, 0.0);
  for (const auto& [lo, hi] : chunk_ranges(n, cfg)) {
    InputPerturbation local;
    if (zeroing) {
      for (std::size_t pos : perturbation->positions) {
        if (pos >= n) throw std::out_of_range("perturbation position outside the document");
        if (pos >= lo && pos < hi) local.positions.push_back(pos - lo);
      }
    }
    const SequenceOutput seq = decode(slice(ex, lo, hi), params, zeroing ? &local : nullptr);
    for (std::size_t t = lo; t < hi; ++t) {
      const auto i = static_cast<Eigen::Index>(t - lo);
      votes[t] += seq.labels[t - lo] == 1 ? 1 : -1;
      ++seen[t];
      p1[t] += seq.marginals(i, 1);
      mask[t] += seq.gate(i);
      axm[t] += seq.row_sum(i) * seq.gate(i);
    }
  }
  out.labels.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    p1[t] /= seen[t];
    mask[t] /= seen[t];
    axm[t] /= seen[t];
    out.labels[t] = votes[t] > 0 ? 1 : (votes[t] < 0 ? 0 : (p1[t] > 0.5 ? 1 : 0));
  }
  out.spans = corpus::spans_from_labels(out.labels);
  out.raw_probs = p1;
  out.probs = temperature == 1.0 ? p1 : evalkit::apply_temperature(p1, temperature);
  out.mask = std::move(mask);
  out.attention_x_mask = std::move(axm);
  return out;
}

}  // namespace segmark::model
