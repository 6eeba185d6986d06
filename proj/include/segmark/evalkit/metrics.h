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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segmark/corpus/corpus.h"

namespace segmark::evalkit {

using corpus::Span;

inline constexpr std::array<double, 4> kDefaultTaus = {0.3, 0.5, 0.7, 0.9};

// |a ∩ b| / |a ∪ b| over token index sets.
double iou(const Span& a, const Span& b);

enum class Matching {
  kExistence,  // a span counts when any counterpart reaches the threshold
  kGreedyOneToOne,
};

// Gold spans with at least one prediction at IoU >= tau. With no gold spans
// the result is 1.0 when pred is also empty and 0.0 otherwise.
double sbda(const std::vector<Span>& gold, const std::vector<Span>& pred,
            double tau, Matching matching = Matching::kExistence);

// Predicted spans with at least one gold span at IoU >= tau; same empty-set
// conventions with the roles swapped.
double segprec(const std::vector<Span>& gold, const std::vector<Span>& pred,
               double tau, Matching matching = Matching::kExistence);

// Numerator of sbda: matched gold spans.
std::size_t matched_count(const std::vector<Span>& reference,
                          const std::vector<Span>& candidates, double tau,
                          Matching matching = Matching::kExistence);

struct TokenMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Positive class is label 1. Precision with no positive predictions and
// recall with no positive gold are 0; F1 is 0 when both are 0.
TokenMetrics token_metrics(const std::vector<int>& gold,
                           const std::vector<int>& pred);

inline constexpr std::array<const char*, 5> kBoundaryBuckets = {
    "off_by_1", "off_by_3", "off_by_5", "off_by_10", "over_10"};

struct BoundaryErrors {
  // Indexed like kBoundaryBuckets: |d| <= 1, <= 3, <= 5, <= 10, > 10.
  std::array<std::size_t, 5> counts{};
  std::size_t exact = 0;
  std::size_t total = 0;  // gold boundaries inspected

  std::size_t errors() const;
  std::array<double, 5> fractions() const;  // zeros when errors() == 0
  void add(const BoundaryErrors& o);
};

// For every gold start (end), the distance to the nearest predicted start
// (end). A kind with no predicted boundaries counts as > 10.
BoundaryErrors boundary_errors(const std::vector<Span>& gold,
                               const std::vector<Span>& pred);

// Ties the gold and predicted sides of one document together.
struct DocPair {
  std::vector<Span> gold;
  std::vector<Span> pred;
  std::vector<int> gold_labels;
  std::vector<int> pred_labels;
  std::vector<double> probs;  // p(label = 1); may be empty
};

struct CalibrationSummary {
  double ece = 0.0;
  double brier = 0.0;
  double temperature = 1.0;
};

struct EvalReport {
  std::map<double, double> sbda;
  std::map<double, double> segprec;
  TokenMetrics tokens;
  std::optional<CalibrationSummary> calibration;
  BoundaryErrors boundaries;
  // SBDA at tau = 0.5 pooled over the whole set.
  double relaxed_span_acc = 0.0;
  std::size_t documents = 0;
  std::size_t gold_spans = 0;
  std::size_t pred_spans = 0;

  nlohmann::json to_json() const;
};

struct EvalOptions {
  std::vector<double> taus{kDefaultTaus.begin(), kDefaultTaus.end()};
  Matching matching = Matching::kExistence;
  int ece_bins = 15;
  double temperature = 1.0;  // recorded in the report only
};

// Pooled (micro) span metrics: matched spans over all spans in the set.
EvalReport evaluate(const std::vector<DocPair>& docs, const EvalOptions& opts = {});

double relaxed_span_acc(const std::vector<DocPair>& docs);

}  // namespace segmark::evalkit
