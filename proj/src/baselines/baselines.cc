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

#include "segmark/baselines/baselines.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segmark::baselines {

double nearest_rank_percentile(const std::vector<double>& values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty series");
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p / 100.0 * n)));
  return sorted[std::min(rank, sorted.size()) - 1];
}

std::vector<int> flag_below_percentile(const std::vector<double>& scores, double p) {
  if (scores.empty()) return {};
  const double cut = nearest_rank_percentile(scores, p);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] < cut ? 1 : 0;
  return out;
}

std::vector<int> flag_above_percentile(const std::vector<double>& scores, double p) {
  if (scores.empty()) return {};
  const double cut = nearest_rank_percentile(scores, p);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > cut ? 1 : 0;
  return out;
}

std::vector<double> token_log_probs(const corpus::Document& doc,
                                    const stylometry::NgramLM& lm) {
  const std::vector<std::uint32_t> ids = lm.encode(doc.tokens);
  std::vector<double> out(ids.size());
  std::vector<std::uint32_t> context;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i] = std::log(lm.prob(context, ids[i]));
    context.push_back(ids[i]);
  }
  return out;
}

std::vector<double> token_entropies(const corpus::Document& doc,
                                    const stylometry::NgramLM& lm) {
  const std::vector<std::uint32_t> ids = lm.encode(doc.tokens);
  std::vector<double> out(ids.size());
  std::vector<std::uint32_t> context;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i] = lm.entropy(context);
    context.push_back(ids[i]);
  }
  return out;
}

std::vector<int> logp_detect(const corpus::Document& doc, const stylometry::NgramLM& lm,
                             double percentile) {
  return flag_below_percentile(token_log_probs(doc, lm), percentile);
}

std::vector<int> entropy_detect(const corpus::Document& doc, const stylometry::NgramLM& lm,
                                double percentile) {
  return flag_above_percentile(token_entropies(doc, lm), percentile);
}

double GoldFractionScorer::score(const SpanRequest& request) {
  if (!request.doc) throw std::invalid_argument("gold_fraction: request without document");
  const Span s = request.span;
  if (s.end <= s.start) return 0.0;
  std::size_t ai = 0;
  for (std::size_t i = s.start; i < s.end; ++i) ai += request.doc->labels.at(i) == 1;
  return static_cast<double>(ai) / static_cast<double>(s.end - s.start);
}

double SurprisalScorer::score(const SpanRequest& request) {
  if (!request.doc) throw std::invalid_argument("lm_surprisal: request without document");
  const std::vector<double> bits = stylometry::token_surprisal(lm_, *request.doc);
  const Span s = request.span;
  if (s.end <= s.start) return 0.0;
  const double b = scale_ > 0.0 ? scale_ : 1.0;
  double total = 0.0;
  for (std::size_t i = s.start; i < s.end; ++i) {
    const double x = bits.at(i);
    total += std::isinf(x) ? 1.0 : x / (x + b);
  }
  return total / static_cast<double>(s.end - s.start);
}

std::vector<Span> partition(const corpus::Document& doc, const PartitionOptions& opts) {
  std::vector<Span> cells;
  const std::size_t n = doc.size();
  if (opts.kind == Partition::kFixedK) {
    if (opts.k == 0) throw std::invalid_argument("partition: k must be positive");
    for (std::size_t lo = 0; lo < n; lo += opts.k) cells.push_back({lo, std::min(n, lo + opts.k)});
    return cells;
  }
  for (const auto& [lo, hi] : stylometry::sentence_ranges(doc)) cells.push_back({lo, hi});
  return cells;
}

SpanScoreResult span_score_adapt(const corpus::Document& doc, SpanScorer& scorer,
                                 const PartitionOptions& opts, double threshold) {
  SpanScoreResult out;
  out.labels.assign(doc.size(), 0);
  out.token_scores.assign(doc.size(), 0.0);
  for (const Span& cell : partition(doc, opts)) {
    SpanRequest req;
    req.doc = &doc;
    req.span = cell;
    for (std::size_t i = cell.start; i < cell.end; ++i) {
      if (i > cell.start) req.text += ' ';
      req.text += doc.tokens[i].text;
    }
    double s = 0.0;
    try {
      s = scorer.score(req);
      if (!std::isfinite(s)) {
        out.failures.push_back({cell, scorer.name() + ": non-finite score"});
        continue;
      }
    } catch (const std::exception& e) {
      out.failures.push_back({cell, scorer.name() + ": " + e.what()});
      continue;
    }
    for (std::size_t i = cell.start; i < cell.end; ++i) {
      out.token_scores[i] = s;
      out.labels[i] = s >= threshold ? 1 : 0;
    }
  }
  return out;
}

}  // namespace segmark::baselines
