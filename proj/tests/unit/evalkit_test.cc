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

#include <cmath>

#include "doctest.h"
#include "gradcheck.h"
#include "oracles.h"
#include "segmark/evalkit/calibration.h"
#include "segmark/evalkit/faithfulness.h"
#include "segmark/evalkit/metrics.h"

namespace segmark::evalkit {
namespace {

using Spans = std::vector<Span>;

std::vector<Span> random_spans(text::Rng& rng, std::size_t n) {
  return corpus::spans_from_labels(oracle::random_labels(rng, n));
}

TEST_CASE("iou") {
  CHECK(iou({2, 6}, {2, 6}) == 1.0);
  CHECK(iou({0, 2}, {2, 4}) == 0.0);
  CHECK(iou({0, 5}, {2, 7}) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("sbda") {
  const Spans gold = {{0, 10}}, half = {{0, 5}};
  for (double tau : kDefaultTaus) {
    CHECK(sbda(gold, gold, tau) == 1.0);
    CHECK(sbda(gold, {}, tau) == 0.0);
  }
  CHECK(sbda(gold, half, 0.3) == 1.0);
  CHECK(sbda(gold, half, 0.5) == 1.0);
  CHECK(sbda(gold, half, 0.7) == 0.0);
  CHECK(sbda(gold, half, 0.9) == 0.0);
  CHECK(sbda({}, {}, 0.5) == 1.0);
  CHECK(sbda({}, half, 0.5) == 0.0);
  CHECK_THROWS(sbda(gold, half, 0.0));
  CHECK_THROWS(sbda(gold, half, 1.5));
}

TEST_CASE("segprec") {
  const Spans gold = {{0, 2}};
  CHECK(segprec(gold, gold, 0.5) == 1.0);
  CHECK(segprec(gold, {{0, 2}, {8, 9}}, 0.5) == 0.5);
}

TEST_CASE("span metrics match the pairwise IoU table") {
  text::Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const Spans gold = random_spans(rng, n), pred = random_spans(rng, n);
    for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      CHECK(sbda(gold, pred, tau) == oracle::brute_sbda(gold, pred, tau));
      CHECK(segprec(gold, pred, tau) == oracle::brute_segprec(gold, pred, tau));
    }
  }
}

TEST_CASE("greedy one-to-one matching never exceeds existence matching") {
  CHECK(sbda({{0, 4}, {5, 9}}, {{0, 9}}, 0.4, Matching::kGreedyOneToOne) == 0.5);
  CHECK(sbda({{0, 4}, {5, 9}}, {{0, 9}}, 0.4) == 1.0);
  text::Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const Spans gold = random_spans(rng, n), pred = random_spans(rng, n);
    CHECK(sbda(gold, pred, 0.3, Matching::kGreedyOneToOne) <= sbda(gold, pred, 0.3));
  }
}

TEST_CASE("token metrics") {
  const std::vector<int> gold = {0, 1, 1, 0, 1};
  const TokenMetrics perfect = token_metrics(gold, gold);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(token_metrics(gold, std::vector<int>(5, 0)).recall == 0.0);
  CHECK(token_metrics(gold, std::vector<int>(5, 0)).f1 == 0.0);

  text::Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const auto g = oracle::random_labels(rng, n), p = oracle::random_labels(rng, n);
    const auto c = oracle::confusion(g, p);
    const TokenMetrics m = token_metrics(g, p);
    CHECK(m.tp == c.tp);
    CHECK(m.fp == c.fp);
    CHECK(m.fn == c.fn);
    CHECK(m.tn == c.tn);
    CHECK(m.accuracy == doctest::Approx(static_cast<double>(c.tp + c.tn) / n));
    const double prec = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double rec = c.tp + c.fn ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    CHECK(m.precision == doctest::Approx(prec));
    CHECK(m.recall == doctest::Approx(rec));
    CHECK(m.f1 == doctest::Approx(prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0));
  }
}

TEST_CASE("boundary error histogram") {
  const BoundaryErrors one = boundary_errors({{11, 20}}, {{10, 20}});
  CHECK(one.counts[0] == 1);
  CHECK(one.exact == 1);
  CHECK(one.total == 2);

  const BoundaryErrors same = boundary_errors({{2, 5}, {8, 9}}, {{2, 5}, {8, 9}});
  CHECK(same.errors() == 0);
  CHECK(same.exact == same.total);
  CHECK(same.fractions() == std::array<double, 5>{});

  // Gold starts 0, 30; ends 10, 40. Pred starts 3, 30; end 25, 52.
  // Distances: start 0 -> 3 (<=3), start 30 exact, end 10 -> 25 (>10), end 40 -> 52 (>10).
  const BoundaryErrors crafted = boundary_errors({{0, 10}, {30, 40}}, {{3, 25}, {30, 52}});
  CHECK(crafted.exact == 1);
  CHECK(crafted.counts == std::array<std::size_t, 5>{0, 1, 0, 0, 2});

  text::Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(60);
    const Spans gold = random_spans(rng, n), pred = random_spans(rng, n);
    const BoundaryErrors b = boundary_errors(gold, pred);
    const auto ref = oracle::brute_boundaries(gold, pred);
    CHECK(b.exact == ref.exact);
    for (int k = 0; k < 5; ++k) CHECK(b.counts[k] == ref.buckets[k]);
    CHECK(b.total == 2 * gold.size());
  }
}

TEST_CASE("evaluate pools spans across documents") {
  std::vector<DocPair> docs(2);
  docs[0].gold = {{0, 4}};
  docs[0].pred = {{0, 4}};
  docs[0].gold_labels = docs[0].pred_labels = {1, 1, 1, 1, 0};
  docs[1].gold = {{0, 1}, {3, 4}, {6, 7}};
  docs[1].pred = {};
  docs[1].gold_labels = {1, 0, 0, 1, 0, 0, 1};
  docs[1].pred_labels = std::vector<int>(7, 0);
  const EvalReport r = evaluate(docs);
  CHECK(r.sbda.at(0.5) == 0.25);
  CHECK(r.relaxed_span_acc == 0.25);
  CHECK(r.gold_spans == 4);
  CHECK_FALSE(r.calibration.has_value());
  const auto j = r.to_json();
  CHECK(j["sbda"]["0.5"] == 0.25);
  CHECK(j["ece"].is_null());
}

TEST_CASE("ece and brier") {
  const std::vector<int> y = {0, 1, 1, 0, 1, 0};
  const std::vector<double> exact(y.begin(), y.end());
  CHECK(ece(exact, y) == 0.0);
  CHECK(brier(exact, y) == 0.0);
  CHECK(ece(std::vector<double>(6, 0.5), {0, 1, 0, 1, 0, 1}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(brier(std::vector<double>(6, 0.5), {0, 1, 0, 1, 0, 1}) == doctest::Approx(0.25));

  text::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(200);
    std::vector<double> p(n);
    std::vector<int> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform();
      lab[i] = rng.bernoulli(0.5);
    }
    // Direct formula: 15 equal bins over top-label confidence.
    double acc[15] = {}, conf[15] = {}, cnt[15] = {}, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::max(p[i], 1 - p[i]);
      const int b = std::min(14, static_cast<int>(c * 15));
      cnt[b] += 1;
      conf[b] += c;
      acc[b] += (p[i] >= 0.5 ? 1 : 0) == lab[i];
      sq += (p[i] - lab[i]) * (p[i] - lab[i]);
    }
    double ref = 0.0;
    for (int b = 0; b < 15; ++b) ref += std::abs(acc[b] - conf[b]) / n;
    CHECK(std::abs(ece(p, lab) - ref) <= 1e-12);
    CHECK(std::abs(brier(p, lab) - sq / n) <= 1e-12);
  }
}

// Labels drawn from sigmoid(z); scaled probabilities use sigmoid(scale * z).
void calibrated_set(double scale, std::vector<double>& probs, std::vector<int>& labels) {
  text::Rng rng(6);
  for (int i = 0; i < 40000; ++i) {
    const double z = rng.uniform(-4.0, 4.0);
    labels.push_back(rng.bernoulli(sigmoid(z)));
    probs.push_back(sigmoid(scale * z));
  }
}

TEST_CASE("temperature recovers the calibrated scale") {
  std::vector<double> p;
  std::vector<int> y;
  calibrated_set(1.0, p, y);
  const TemperatureFit fit = fit_temperature(p, y);
  CHECK(std::abs(fit.temperature - 1.0) <= 0.05);
  CHECK(fit.nll_after <= fit.nll_before);

  std::vector<double> p2;
  std::vector<int> y2;
  calibrated_set(2.0, p2, y2);
  const TemperatureFit fit2 = fit_temperature(p2, y2);
  CHECK(std::abs(fit2.temperature - 2.0) <= 0.1);
  CHECK(ece(apply_temperature(p2, fit2.temperature), y2) < ece(p2, y2));
}

TEST_CASE("temperature fitting validates its inputs") {
  CHECK_THROWS_AS(fit_temperature({0.2, 0.4}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(fit_temperature({0.2, 1.4}, {0, 1}), std::invalid_argument);
  CHECK(logit_of(1.0) < 40.0);
  CHECK(apply_temperature({0.5, 0.9}, 1.0)[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("mask selection") {
  const std::vector<double> m = {0.5, 0.9, 0.1, 0.9, 0.3, 0.7, 0.2, 0.8, 0.6, 0.4};
  CHECK(select_by_mask(m, 0.2, Rank::kTop) == std::vector<std::size_t>{1, 3});
  CHECK(select_by_mask(m, 0.2, Rank::kBottom) == std::vector<std::size_t>{2, 6});
  CHECK(select_by_mask(m, 0.0, Rank::kTop).empty());
  CHECK(select_by_mask(std::vector<double>(5, 0.5), 0.4, Rank::kTop) == std::vector<std::size_t>{0, 1});
  // floor(0.29 * 100) is 29 despite rounding in the product.
  CHECK(select_by_mask(std::vector<double>(100, 0.5), 0.29, Rank::kTop).size() == 29);
}

model::Segmenter random_segmenter(text::Rng& rng, std::vector<corpus::Document>& docs) {
  for (int i = 0; i < 12; ++i) docs.push_back(oracle::random_document(rng, "d" + std::to_string(i), 5, 40));
  model::Segmenter s;
  s.params = gradcheck::random_params(gradcheck::tiny_config(false), rng);
  s.style = stylometry::StyleExtractor::fit(docs);
  return s;
}

TEST_CASE("faithfulness with k = 0 reproduces the clean report") {
  text::Rng rng(7);
  std::vector<corpus::Document> docs;
  const model::Segmenter s = random_segmenter(rng, docs);
  for (PerturbMode mode : {PerturbMode::kMask, PerturbMode::kShuffle}) {
    FaithfulnessOptions o;
    o.k_fraction = 0.0;
    o.mode = mode;
    const FaithfulnessReport r = faithfulness(s, docs, o);
    CHECK(r.tokens_selected == 0);
    CHECK(r.perturbed.to_json() == r.clean.to_json());
    CHECK(r.clean.to_json() == evaluate_model(s, docs).to_json());
  }
}

TEST_CASE("faithfulness perturbations are deterministic and in range") {
  text::Rng rng(8);
  std::vector<corpus::Document> docs;
  const model::Segmenter s = random_segmenter(rng, docs);
  FaithfulnessOptions o;
  o.mode = PerturbMode::kShuffle;
  o.k_fraction = 0.3;
  for (const auto& d : docs) {
    const auto mask = s.predict(d).mask;
    const auto a = faithfulness_perturbation(d, mask, o), b = faithfulness_perturbation(d, mask, o);
    CHECK(a.positions == b.positions);
    CHECK(a.source == b.source);
    CHECK(a.positions.size() == static_cast<std::size_t>(std::floor(0.3 * d.size() + 1e-9)));
    auto sorted = a.source;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == a.positions);
  }
  const FaithfulnessReport r = faithfulness(s, docs, o);
  CHECK(r.to_json().contains("clean"));
}

}  // namespace
}  // namespace segmark::evalkit
