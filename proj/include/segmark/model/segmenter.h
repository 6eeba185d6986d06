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

#include "segmark/corpus/corpus.h"
#include "segmark/model/model.h"
#include "segmark/stylometry/stylometry.h"

namespace segmark::model {

Example featurize(const corpus::Document& doc,
                  const stylometry::StyleExtractor& style,
                  const ModelConfig& config);

struct Prediction {
  std::vector<int> labels;
  std::vector<corpus::Span> spans;
  std::vector<double> probs;      // p(label = 1), temperature applied
  std::vector<double> raw_probs;  // p(label = 1) at T = 1
  std::vector<double> mask;
  // Row sum of the attention output scaled by the gate.
  std::vector<double> attention_x_mask;
};

// A trained model together with everything needed to featurize raw
// documents: the style extractor (with its language model) and the fitted
// temperature.
struct Segmenter {
  ModelParams params;
  stylometry::StyleExtractor style;
  double temperature = 1.0;

  Example featurize(const corpus::Document& doc) const {
    return model::featurize(doc, style, params.config);
  }

  // Documents longer than max_seq_len are decoded in overlapping chunks.
  // Overlapped tokens take the majority label; a tie goes to the averaged
  // marginal. `perturbation` indexes tokens of the whole document.
  Prediction predict(const corpus::Document& doc,
                     const InputPerturbation* perturbation = nullptr) const;
  Prediction predict(const Example& ex,
                     const InputPerturbation* perturbation = nullptr) const;
};

}  // namespace segmark::model
