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
#include <vector>

#include "segmark/evalkit/metrics.h"
#include "segmark/model/segmenter.h"

namespace segmark::evalkit {

DocPair make_pair(const corpus::Document& doc, const model::Prediction& pred);

// Predicts every document and scores the set.
EvalReport evaluate_model(const model::Segmenter& model,
                          const std::vector<corpus::Document>& docs,
                          const EvalOptions& opts = {});

enum class PerturbMode { kMask, kShuffle };
enum class Rank { kTop, kBottom };

struct FaithfulnessOptions {
  double k_fraction = 0.10;
  PerturbMode mode = PerturbMode::kMask;
  Rank which = Rank::kTop;
  std::uint64_t seed = 1;  // shuffle permutations
  EvalOptions eval;
};

// floor(k * T) token indices ranked by mask value; top takes the largest,
// bottom the smallest, ties toward the lower index. Returned ascending.
std::vector<std::size_t> select_by_mask(const std::vector<double>& mask,
                                        double k_fraction, Rank which);

// The input edit for one document given its clean mask.
model::InputPerturbation faithfulness_perturbation(const corpus::Document& doc,
                                                   const std::vector<double>& mask,
                                                   const FaithfulnessOptions& opts);

struct FaithfulnessReport {
  EvalReport clean;
  EvalReport perturbed;
  std::size_t tokens_selected = 0;

  // perturbed minus clean SBDA at tau.
  double delta_sbda(double tau) const { return perturbed.sbda.at(tau) - clean.sbda.at(tau); }
  nlohmann::json to_json() const;
};

FaithfulnessReport faithfulness(const model::Segmenter& model,
                                const std::vector<corpus::Document>& docs,
                                const FaithfulnessOptions& opts);

}  // namespace segmark::evalkit
