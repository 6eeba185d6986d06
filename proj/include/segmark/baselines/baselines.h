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

#include <memory>
#include <string>
#include <vector>

#include "segmark/corpus/corpus.h"
#include "segmark/stylometry/stylometry.h"

namespace segmark::baselines {

using corpus::Span;

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (rank at
// least 1). Throws on an empty series or p outside [0, 100].
double nearest_rank_percentile(const std::vector<double>& values, double p);

// 1 where the score is strictly below (above) the series' p-th percentile.
std::vector<int> flag_below_percentile(const std::vector<double>& scores, double p);
std::vector<int> flag_above_percentile(const std::vector<double>& scores, double p);

// Natural-log probability of each token given its preceding tokens.
std::vector<double> token_log_probs(const corpus::Document& doc,
                                    const stylometry::NgramLM& lm);

// Entropy of the next-token distribution at each position.
std::vector<double> token_entropies(const corpus::Document& doc,
                                    const stylometry::NgramLM& lm);

inline constexpr double kLogpPercentile = 25.0;
inline constexpr double kEntropyPercentile = 75.0;

// Low log p(x) reads as machine text.
std::vector<int> logp_detect(const corpus::Document& doc, const stylometry::NgramLM& lm,
                             double percentile = kLogpPercentile);

// High next-token entropy reads as machine text.
std::vector<int> entropy_detect(const corpus::Document& doc, const stylometry::NgramLM& lm,
                                double percentile = kEntropyPercentile);

struct SpanRequest {
  const corpus::Document* doc = nullptr;
  Span span;
  std::string text;  // the span's tokens joined by single spaces
};

// A document-level detector applied to one span at a time. Implementations
// signal failure by throwing; non-finite scores count as failures too.
class SpanScorer {
 public:
  virtual ~SpanScorer() = default;
  virtual std::string name() const = 0;
  virtual double score(const SpanRequest& request) = 0;
};

// Scores a span by the fraction of its gold tokens labeled AI.
class GoldFractionScorer : public SpanScorer {
 public:
  std::string name() const override { return "gold_fraction"; }
  double score(const SpanRequest& request) override;
};

// Mean squashed surprisal of the span under a human-text language model.
class SurprisalScorer : public SpanScorer {
 public:
  SurprisalScorer(const stylometry::NgramLM& lm, double scale) : lm_(lm), scale_(scale) {}
  std::string name() const override { return "lm_surprisal"; }
  double score(const SpanRequest& request) override;

 private:
  const stylometry::NgramLM& lm_;
  double scale_;
};

enum class Partition { kSentence, kFixedK };

struct PartitionOptions {
  Partition kind = Partition::kSentence;
  std::size_t k = 16;  // cell width for kFixedK
};

// Consecutive cells covering [0, n) in order.
std::vector<Span> partition(const corpus::Document& doc, const PartitionOptions& opts);

struct SpanFailure {
  Span span;
  std::string message;
};

struct SpanScoreResult {
  std::vector<int> labels;
  std::vector<double> token_scores;  // each cell's score broadcast; 0 on failure
  std::vector<SpanFailure> failures;
};

// Tokens of cells scoring >= threshold are labeled 1. A failing cell is
// labeled 0 and recorded in `failures`.
SpanScoreResult span_score_adapt(const corpus::Document& doc, SpanScorer& scorer,
                                 const PartitionOptions& opts, double threshold);

}  // namespace segmark::baselines
