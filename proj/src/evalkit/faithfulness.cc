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

#include "segmark/evalkit/faithfulness.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "segmark/text/rng.h"

namespace segmark::evalkit {

DocPair make_pair(const corpus::Document& doc, const model::Prediction& pred) {
  DocPair p;
  p.gold = doc.gold_spans;
  p.pred = pred.spans;
  p.gold_labels = doc.labels;
  p.pred_labels = pred.labels;
  p.probs = pred.probs;
  return p;
}

EvalReport evaluate_model(const model::Segmenter& model,
                          const std::vector<corpus::Document>& docs,
                          const EvalOptions& opts) {
  std::vector<DocPair> pairs;
  pairs.reserve(docs.size());
  for (const auto& d : docs) pairs.push_back(make_pair(d, model.predict(d)));
  EvalOptions o = opts;
  o.temperature = model.temperature;
  return evaluate(pairs, o);
}

std::vector<std::size_t> select_by_mask(const std::vector<double>& mask,
                                        double k_fraction, Rank which) {
  if (!(k_fraction >= 0.0 && k_fraction <= 1.0)) {
    throw std::invalid_argument("k_fraction must lie in [0, 1]");
  }
  const auto k = static_cast<std::size_t>(
      std::floor(k_fraction * static_cast<double>(mask.size()) + 1e-9));
  std::vector<std::size_t> idx(mask.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return which == Rank::kTop ? mask[a] > mask[b] : mask[a] < mask[b];
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

model::InputPerturbation faithfulness_perturbation(const corpus::Document& doc,
                                                   const std::vector<double>& mask,
                                                   const FaithfulnessOptions& opts) {
  model::InputPerturbation pert;
  pert.positions = select_by_mask(mask, opts.k_fraction, opts.which);
  if (opts.mode == PerturbMode::kMask) {
    pert.mode = model::InputPerturbation::Mode::kZero;
    return pert;
  }
  pert.mode = model::InputPerturbation::Mode::kShuffle;
  pert.source = pert.positions;
  text::Rng rng(text::combine_seed(opts.seed, text::fnv1a64(doc.id)));
  rng.shuffle(pert.source);
  return pert;
}

nlohmann::json FaithfulnessReport::to_json() const {
  nlohmann::json delta = nlohmann::json::object();
  for (const auto& [tau, v] : clean.sbda) {
    char key[32];
    std::snprintf(key, sizeof key, "%g", tau);
    delta[key] = perturbed.sbda.at(tau) - v;
  }
  return {{"clean", clean.to_json()},
          {"perturbed", perturbed.to_json()},
          {"delta_sbda", delta},
          {"tokens_selected", tokens_selected}};
}

FaithfulnessReport faithfulness(const model::Segmenter& model,
                                const std::vector<corpus::Document>& docs,
                                const FaithfulnessOptions& opts) {
  FaithfulnessReport report;
  std::vector<DocPair> clean, perturbed;
  for (const auto& doc : docs) {
    const model::Prediction base = model.predict(doc);
    clean.push_back(make_pair(doc, base));
    const model::InputPerturbation pert = faithfulness_perturbation(doc, base.mask, opts);
    report.tokens_selected += pert.positions.size();
    perturbed.push_back(make_pair(doc, pert.positions.empty() ? base : model.predict(doc, &pert)));
  }
  EvalOptions eo = opts.eval;
  eo.temperature = model.temperature;
  report.clean = evaluate(clean, eo);
  report.perturbed = evaluate(perturbed, eo);
  return report;
}

}  // namespace segmark::evalkit
