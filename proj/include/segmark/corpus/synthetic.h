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
#include <string>
#include <vector>

#include "segmark/corpus/corpus.h"

namespace segmark::corpus {

// Generator for mixed-authorship documents with a known ground truth. Human
// and AI segments differ in vocabulary (overlapping pools) and in style:
// AI sentences are longer, carry fewer function words, more internal
// punctuation, longer words, and repeat words from a smaller pool.
// Segment boundaries always fall on sentence ends.
struct SynthConfig {
  std::size_t documents = 2000;
  std::size_t min_tokens = 50;
  std::size_t max_tokens = 130;
  // Probability that an AI content word comes from the AI-only pool rather
  // than the shared pool; likewise for human words and the human pool.
  double ai_private_rate = 0.5;
  double human_private_rate = 0.5;
  double human_function_rate = 0.45;
  double ai_function_rate = 0.15;
  double human_comma_rate = 0.04;
  double ai_comma_rate = 0.16;
  double fully_human_rate = 0.05;
  std::uint64_t seed = 1;
};

// Forms: human->ai, ai->human, and mixed (alternating, 3 to 4 segments).
std::vector<Document> generate_synthetic(const SynthConfig& cfg);

}  // namespace segmark::corpus
