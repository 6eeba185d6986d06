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

#include "segmark/evalkit/metrics.h"

#include "segmark/evalkit/calibration.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace segmark::evalkit {

using nlohmann::json;

double iou(const Span& a, const Span& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = a.length() + b.length() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t matched_count(const std::vector<Span>& reference,
                          const std::vector<Span>& candidates, double tau,
                          Matching matching) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("IoU threshold must lie in (0, 1]");
  }
  if (matching == Matching::kExistence) {
    std::size_t matched = 0;
    for (const Span& r : reference) {
      for (const Span& c : candidates) {
        if (iou(r, c) >= tau) {
          ++matched;
          break;
        }
      }
    }
    return matched;
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const double v = iou(reference[i], candidates[j]);
      if (v >= tau) pairs.emplace_back(-v, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used_r(reference.size()), used_c(candidates.size());
  std::size_t matched = 0;
  for (const auto& [neg, i, j] : pairs) {
    if (used_r[i] || used_c[j]) continue;
    used_r[i] = used_c[j] = true;
    ++matched;
  }
  return matched;
}

double sbda(const std::vector<Span>& gold, const std::vector<Span>& pred,
            double tau, Matching matching) {
  if (gold.empty()) {
    if (!(tau > 0.0 && tau <= 1.0)) {
      throw std::invalid_argument("IoU threshold must lie in (0, 1]");
    }
    return pred.empty() ? 1.0 : 0.0;
  }
  return static_cast<double>(matched_count(gold, pred, tau, matching)) /
         static_cast<double>(gold.size());
}

double segprec(const std::vector<Span>& gold, const std::vector<Span>& pred,
               double tau, Matching matching) {
  return sbda(pred, gold, tau, matching);
}

TokenMetrics token_metrics(const std::vector<int>& gold,
                           const std::vector<int>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("token_metrics: length mismatch");
  }
  TokenMetrics m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == 1;
    const bool p = pred[i] == 1;
    if (g && p) ++m.tp;
    else if (!g && p) ++m.fp;
    else if (g && !p) ++m.fn;
    else ++m.tn;
  }
  const auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  m.accuracy = gold.empty() ? 1.0 : ratio(m.tp + m.tn, gold.size());
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

std::size_t BoundaryErrors::errors() const {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  return n;
}

std::array<double, 5> BoundaryErrors::fractions() const {
  std::array<double, 5> out{};
  const std::size_t n = errors();
  if (n == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return out;
}

void BoundaryErrors::add(const BoundaryErrors& o) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
  exact += o.exact;
  total += o.total;
}

BoundaryErrors boundary_errors(const std::vector<Span>& gold,
                               const std::vector<Span>& pred) {
  BoundaryErrors out;
  const auto tally = [&out](std::size_t g, const std::vector<std::size_t>& cands) {
    ++out.total;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t c : cands) best = std::min(best, g > c ? g - c : c - g);
    if (best == 0) {
      ++out.exact;
    } else if (best <= 1) {
      ++out.counts[0];
    } else if (best <= 3) {
      ++out.counts[1];
    } else if (best <= 5) {
      ++out.counts[2];
    } else if (best <= 10) {
      ++out.counts[3];
    } else {
      ++out.counts[4];
    }
  };
  std::vector<std::size_t> starts, ends;
  for (const Span& p : pred) {
    starts.push_back(p.start);
    ends.push_back(p.end);
  }
  for (const Span& g : gold) {
    tally(g.start, starts);
    tally(g.end, ends);
  }
  return out;
}

namespace {

std::string tau_key(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

}  // namespace

EvalReport evaluate(const std::vector<DocPair>& docs, const EvalOptions& opts) {
  EvalReport r;
  r.documents = docs.size();
  std::vector<int> all_gold, all_pred;
  std::vector<double> all_probs;
  bool have_probs = !docs.empty();
  for (const DocPair& d : docs) {
    r.gold_spans += d.gold.size();
    r.pred_spans += d.pred.size();
    all_gold.insert(all_gold.end(), d.gold_labels.begin(), d.gold_labels.end());
    all_pred.insert(all_pred.end(), d.pred_labels.begin(), d.pred_labels.end());
    if (d.probs.size() != d.gold_labels.size()) have_probs = false;
    if (have_probs) all_probs.insert(all_probs.end(), d.probs.begin(), d.probs.end());
    r.boundaries.add(boundary_errors(d.gold, d.pred));
  }
  const auto pooled = [&](double tau, bool gold_side) {
    std::size_t num = 0, den = 0, other = 0;
    for (const DocPair& d : docs) {
      const auto& ref = gold_side ? d.gold : d.pred;
      const auto& cand = gold_side ? d.pred : d.gold;
      num += matched_count(ref, cand, tau, opts.matching);
      den += ref.size();
      other += cand.size();
    }
    if (den == 0) return other == 0 ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  for (double tau : opts.taus) {
    r.sbda[tau] = pooled(tau, true);
    r.segprec[tau] = pooled(tau, false);
  }
  r.relaxed_span_acc = pooled(0.5, true);
  r.tokens = token_metrics(all_gold, all_pred);
  if (have_probs && !all_probs.empty()) {
    CalibrationSummary c;
    c.ece = ece(all_probs, all_gold, opts.ece_bins);
    c.brier = brier(all_probs, all_gold);
    c.temperature = opts.temperature;
    r.calibration = c;
  }
  return r;
}

double relaxed_span_acc(const std::vector<DocPair>& docs) {
  EvalOptions opts;
  opts.taus = {0.5};
  return evaluate(docs, opts).relaxed_span_acc;
}

json EvalReport::to_json() const {
  json j;
  json sb = json::object();
  json sp = json::object();
  for (const auto& [tau, v] : sbda) sb[tau_key(tau)] = v;
  for (const auto& [tau, v] : segprec) sp[tau_key(tau)] = v;
  j["sbda"] = sb;
  j["segprec"] = sp;
  j["token_accuracy"] = tokens.accuracy;
  j["token_precision"] = tokens.precision;
  j["token_recall"] = tokens.recall;
  j["token_f1"] = tokens.f1;
  if (calibration) {
    j["ece"] = calibration->ece;
    j["brier"] = calibration->brier;
    j["temperature"] = calibration->temperature;
  } else {
    j["ece"] = nullptr;
    j["brier"] = nullptr;
    j["temperature"] = nullptr;
  }
  json hist = json::object();
  const auto fr = boundaries.fractions();
  for (std::size_t i = 0; i < kBoundaryBuckets.size(); ++i) {
    hist[kBoundaryBuckets[i]] = fr[i];
  }
  j["boundary_error_hist"] = hist;
  j["boundary_exact"] = boundaries.exact;
  j["boundary_total"] = boundaries.total;
  j["relaxed_span_acc"] = relaxed_span_acc;
  j["documents"] = documents;
  j["gold_spans"] = gold_spans;
  j["pred_spans"] = pred_spans;
  return j;
}

}  // namespace segmark::evalkit
