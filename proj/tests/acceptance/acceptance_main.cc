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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails. Pass criterion names as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "oracles.h"
#include "segmark/attacks/attacks.h"
#include "segmark/baselines/baselines.h"
#include "segmark/corpus/synthetic.h"
#include "segmark/evalkit/calibration.h"
#include "segmark/evalkit/faithfulness.h"
#include "segmark/evalkit/metrics.h"
#include "segmark/model/crf.h"
#include "segmark/model/train.h"
#include "segmark/stylometry/stylometry.h"

namespace {

using namespace segmark;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Matrix random_matrix(text::Rng& rng, Eigen::Index r, Eigen::Index c, double scale) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

Outcome crf_correctness() {
  const auto t0 = Clock::now();
  text::Rng rng(101);
  double worst_nll = 0.0, worst_viterbi = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const int T = 1 + static_cast<int>(rng.uniform_index(8));
    const Matrix o = random_matrix(rng, T, 2, 3.0);
    const Matrix trans = random_matrix(rng, 4, 4, 2.0);
    std::vector<int> y(static_cast<std::size_t>(T));
    for (int& v : y) v = rng.bernoulli(0.5) ? 1 : 0;
    const double expected = oracle::brute_log_partition(o, trans) - oracle::crf_path_score(o, y, trans);
    worst_nll = std::max(worst_nll, std::abs(model::crf_nll(o, y, trans) - expected));
    const double best = oracle::brute_best_score(o, trans);
    worst_viterbi = std::max(
        worst_viterbi, std::abs(oracle::crf_path_score(o, model::viterbi(o, trans), trans) - best));
  }
  const double secs = seconds_since(t0);
  return {worst_nll <= 1e-8 && worst_viterbi <= 1e-12 && secs < 10.0,
          fmt("max |nll - brute| = %.2e, max viterbi score gap = %.2e, %.2fs", worst_nll,
              worst_viterbi, secs)};
}

Outcome gradient_fidelity() {
  const auto t0 = Clock::now();
  text::Rng rng(202);
  gradcheck::GroupErrors errors;
  int instances = 0;
  for (bool internal : {false, true}) {
    const model::ModelConfig cfg = gradcheck::tiny_config(internal);
    for (int i = 0; i < 30; ++i, ++instances) {
      const model::ModelParams p = gradcheck::random_params(cfg, rng);
      const model::Example ex = gradcheck::random_example(cfg, rng);
      model::ForwardOptions fo;
      if (i % 2 == 1) {
        fo.dropout = 0.2;
        fo.dropout_seed = rng.next_u64();
      }
      gradcheck::check_instance(p, ex, fo, errors);
    }
  }
  double worst = 0.0;
  std::string detail;
  for (const auto& [group, e] : errors.max_error) {
    worst = std::max(worst, e);
    detail += group + "=" + fmt("%.1e", e) + " ";
  }
  const double secs = seconds_since(t0);
  detail += fmt("(%g instances, %g entries, %.1fs)", instances,
                static_cast<double>(errors.checked), secs);
  const bool all_groups = errors.max_error.size() == 6;
  return {all_groups && worst <= 1e-4 && secs < 60.0, detail};
}

Outcome metric_oracle() {
  text::Rng rng(303);
  std::size_t mismatches = 0;
  const std::vector<double> taus = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const std::vector<int> gl = oracle::random_labels(rng, n);
    const std::vector<int> pl = rng.bernoulli(0.3) ? gl : oracle::random_labels(rng, n);
    const auto gold = oracle::spans_of(gl), pred = oracle::spans_of(pl);
    for (const auto& a : gold) {
      for (const auto& b : pred) mismatches += evalkit::iou(a, b) != oracle::brute_iou(a, b);
    }
    for (double tau : taus) {
      mismatches += evalkit::sbda(gold, pred, tau) != oracle::brute_sbda(gold, pred, tau);
      mismatches += evalkit::segprec(gold, pred, tau) != oracle::brute_segprec(gold, pred, tau);
    }
    const auto tm = evalkit::token_metrics(gl, pl);
    const auto c = oracle::confusion(gl, pl);
    mismatches += tm.tp != c.tp || tm.fp != c.fp || tm.tn != c.tn || tm.fn != c.fn;
    const double acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    const double prec = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    const double rec = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    mismatches += tm.accuracy != acc || tm.precision != prec || tm.recall != rec || tm.f1 != f1;
    const auto be = evalkit::boundary_errors(gold, pred);
    const auto bb = oracle::brute_boundaries(gold, pred);
    mismatches += be.exact != bb.exact || be.total != 2 * gold.size();
    for (int k = 0; k < 5; ++k) mismatches += be.counts[static_cast<std::size_t>(k)] != bb.buckets[k];
  }
  return {mismatches == 0, fmt("%g mismatches over 1000 configurations", static_cast<double>(mismatches))};
}

bool same_surface(const corpus::Document& a, const corpus::Document& b) {
  return a.raw_text == b.raw_text && a.tokens == b.tokens && a.labels == b.labels &&
         a.gold_spans == b.gold_spans;
}

Outcome attack_invariants() {
  text::Rng rng(404);
  std::vector<corpus::Document> docs;
  for (int i = 0; i < 500; ++i) docs.push_back(oracle::random_document(rng, "d" + std::to_string(i)));
  std::size_t violations = 0, changed = 0;
  for (attacks::AttackKind kind : attacks::kAllAttacks) {
    for (const auto& d : docs) {
      const attacks::AttackConfig cfg{kind, 0.3, 17};
      const corpus::Document a = attacks::apply_attack(d, cfg);
      const corpus::Document b = attacks::apply_attack(d, cfg);
      violations += a.size() != d.size() || a.labels != d.labels || a.gold_spans != d.gold_spans;
      violations += !(a == b);
      changed += a.raw_text != d.raw_text;
      const corpus::Document zero = attacks::apply_attack(d, {kind, 0.0, 17});
      violations += !same_surface(zero, d);
    }
  }
  return {violations == 0 && changed > 0,
          fmt("%g violations; %g of 3000 attacked documents changed", static_cast<double>(violations),
              static_cast<double>(changed))};
}

// Shared between the learning, calibration and faithfulness criteria.
struct Trained {
  corpus::SplitResult split;
  std::vector<corpus::Document> attacked_test;
  model::TrainResult full;
  model::TrainResult ablated;
  double seconds = 0.0;
};

constexpr double kLrScale = 300.0;

const Trained& trained() {
  static const Trained t = [] {
    const auto t0 = Clock::now();
    Trained out;
    corpus::SynthConfig sc;
    sc.documents = 2000;
    sc.seed = 1;
    corpus::SplitOptions so;
    so.seed = 7;
    out.split = corpus::split_corpus(corpus::generate_synthetic(sc), so);
    for (const auto& d : out.split.test) {
      out.attacked_test.push_back(attacks::all_mixed(d, 0.15, 99));
    }
    model::TrainConfig tc;
    tc.lr_scale = kLrScale;
    tc.seed = 1;
    const auto report = [](const char* tag) {
      return [tag](const model::EpochStats& e) {
        std::printf("  [%s] epoch %d loss %.3f valid SBDA@0.3 %.4f (%.1fs)\n", tag, e.epoch,
                    e.train_loss, e.valid_sbda, e.seconds);
        std::fflush(stdout);
      };
    };
    model::ModelConfig full_cfg;
    out.full = model::train(out.split.train, out.split.valid, full_cfg, tc, report("full"));
    model::ModelConfig ablated_cfg;
    ablated_cfg.use_infomask = false;
    out.ablated = model::train(out.split.train, out.split.valid, ablated_cfg, tc, report("ablated"));
    out.seconds = seconds_since(t0);
    return out;
  }();
  return t;
}

double sbda03(const model::Segmenter& m, const std::vector<corpus::Document>& docs) {
  evalkit::EvalOptions o;
  o.taus = {0.3};
  return evalkit::evaluate_model(m, docs, o).sbda.at(0.3);
}

Outcome learning_check() {
  const Trained& t = trained();
  const double clean = sbda03(t.full.model, t.split.test);
  const double atk_full = sbda03(t.full.model, t.attacked_test);
  const double atk_ablated = sbda03(t.ablated.model, t.attacked_test);
  const bool loss_drop = t.full.log.epochs.front().probe_loss < t.full.log.initial_probe_loss;
  return {clean >= 0.80 && atk_full > atk_ablated && loss_drop && t.seconds <= 900.0,
          fmt("clean SBDA@0.3 %.4f; all_mixed@0.15 full %.4f vs ablated %.4f; %.0fs", clean,
              atk_full, atk_ablated, t.seconds)};
}

Outcome calibration_protocol() {
  const Trained& t = trained();
  std::vector<double> probs;
  std::vector<int> labels;
  for (const auto& d : t.split.valid) {
    const auto pred = t.full.model.predict(d);
    probs.insert(probs.end(), pred.raw_probs.begin(), pred.raw_probs.end());
    labels.insert(labels.end(), d.labels.begin(), d.labels.end());
  }
  const auto fit = evalkit::fit_temperature(probs, labels);
  const auto scaled = evalkit::apply_temperature(probs, fit.temperature);
  const double ece0 = evalkit::ece(probs, labels), ece1 = evalkit::ece(scaled, labels);
  const double br0 = evalkit::brier(probs, labels), br1 = evalkit::brier(scaled, labels);

  text::Rng rng(606);
  std::vector<double> cp;
  std::vector<int> cl;
  for (int i = 0; i < 200000; ++i) {
    const double p = rng.uniform(0.001, 0.999);
    cp.push_back(p);
    cl.push_back(rng.bernoulli(p) ? 1 : 0);
  }
  const double cal_ece = evalkit::ece(cp, cl);
  const double cal_t = evalkit::fit_temperature(cp, cl).temperature;
  const bool pass = ece1 <= ece0 && br1 <= br0 + 1e-6 && cal_ece <= 0.01 && cal_t >= 0.95 &&
                    cal_t <= 1.05;
  return {pass, fmt("T*=%.4f ECE %.5f -> %.5f, Brier %.6f -> ", fit.temperature, ece0, ece1, br0) +
                    fmt("%.6f; calibrated set ECE %.5f T*=%.4f", br1, cal_ece, cal_t)};
}

Outcome faithfulness_protocol() {
  const Trained& t = trained();
  evalkit::FaithfulnessOptions fo;
  fo.eval.taus = {0.3};
  fo.which = evalkit::Rank::kTop;
  const auto top = evalkit::faithfulness(t.full.model, t.split.test, fo);
  fo.which = evalkit::Rank::kBottom;
  const auto bottom = evalkit::faithfulness(t.full.model, t.split.test, fo);
  const double drop_top = -top.delta_sbda(0.3);
  const double drop_bottom = -bottom.delta_sbda(0.3);
  return {drop_top > drop_bottom && drop_bottom <= 0.02,
          fmt("SBDA@0.3 drop: top-10%% %.4f, bottom-10%% %.4f (clean %.4f)", drop_top, drop_bottom,
              top.clean.sbda.at(0.3))};
}

Outcome percentile_detectors() {
  text::Rng rng(808);
  std::size_t mismatches = 0;
  // Counting oracle: x_i exceeds the nearest-rank 75th percentile exactly
  // when at least r = ceil(0.75 n) values are strictly smaller than x_i.
  const auto oracle_flags = [](const std::vector<double>& s) {
    const std::size_t n = s.size();
    const std::size_t r = std::max<std::size_t>(1, (75 * n + 99) / 100);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t smaller = 0;
      for (double v : s) smaller += v < s[i];
      out[i] = smaller >= r ? 1 : 0;
    }
    return out;
  };
  std::vector<corpus::Document> train_docs;
  for (int i = 0; i < 50; ++i) train_docs.push_back(oracle::random_document(rng, "lm" + std::to_string(i), 20, 80));
  for (auto& d : train_docs) std::fill(d.labels.begin(), d.labels.end(), 0);
  const auto lm = stylometry::NgramLM::train(train_docs, 2, 0.5);
  for (int i = 0; i < 250; ++i) {
    const auto doc = oracle::random_document(rng, "q" + std::to_string(i), 1, 80);
    mismatches += baselines::entropy_detect(doc, lm) != oracle_flags(baselines::token_entropies(doc, lm));
  }
  for (int i = 0; i < 250; ++i) {
    std::vector<double> s(1 + rng.uniform_index(60));
    for (double& v : s) v = static_cast<double>(rng.uniform_index(12));  // many ties
    mismatches += baselines::flag_above_percentile(s, 75.0) != oracle_flags(s);
  }
  const double v = static_cast<double>(lm.vocab_size());
  // UNK never occurs in training text, so it is an unseen context.
  const double unseen = lm.entropy({stylometry::NgramLM::kUnk});
  const double uniform_err = std::abs(unseen - std::log(v));
  return {mismatches == 0 && uniform_err <= 1e-12,
          fmt("%g flag mismatches over 500 series; |H(uniform) - ln V| = %.1e",
              static_cast<double>(mismatches), uniform_err)};
}

std::string random_tagged(text::Rng& rng) {
  const std::size_t n = 1 + rng.uniform_index(30);
  std::string out;
  bool open = false, just_closed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += rng.bernoulli(0.2) ? "\t" : " ";
    // Adjacent tagged regions would merge into one span on re-serialization.
    if (!open && !just_closed && rng.bernoulli(0.25)) {
      out += corpus::kOpenTag;
      open = true;
    }
    out += oracle::random_word(rng);
    just_closed = false;
    if (open && rng.bernoulli(0.3)) {
      out += corpus::kCloseTag;
      open = false;
      just_closed = true;
    }
  }
  if (open) out += corpus::kCloseTag;
  return out;
}

Outcome round_trip() {
  text::Rng rng(909);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string tagged = random_tagged(rng);
    const corpus::Document a = corpus::parse_tagged(tagged, "t");
    const std::string again = corpus::to_tagged(a);
    const corpus::Document b = corpus::parse_tagged(again, "t");
    failures += !(a == b) || again != tagged;
    failures += corpus::from_json(corpus::to_json(a)) != a;
  }

  // Hygiene: a synthetic corpus seeded with near-duplicates, checked pairwise
  // with string trigram sets.
  corpus::SynthConfig sc;
  sc.documents = 400;
  sc.seed = 3;
  std::vector<corpus::Document> docs = corpus::generate_synthetic(sc);
  for (int i = 0; i < 120; ++i) {
    const auto& src = docs[rng.uniform_index(400)];
    std::vector<std::string> words;
    for (const auto& t : src.tokens) words.push_back(t.text);
    const std::size_t edits = rng.uniform_index(words.size() / 2 + 1);
    for (std::size_t e = 0; e < edits; ++e) words[rng.uniform_index(words.size())] = "zz";
    auto copy = corpus::with_token_texts(src, words);
    copy.id = "dup" + std::to_string(i);
    docs.push_back(copy);
  }
  corpus::SplitOptions so;
  so.seed = 11;
  const auto split = corpus::split_corpus(docs, so);
  std::vector<std::pair<int, std::set<std::string>>> all;
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    const int tag = part == &split.train ? 0 : (part == &split.valid ? 1 : 2);
    for (const auto& d : *part) all.emplace_back(tag, oracle::gram_strings(d, 3));
  }
  std::size_t leaks = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i].first != all[j].first && oracle::set_jaccard(all[i].second, all[j].second) > 0.3) ++leaks;
    }
  }
  return {failures == 0 && leaks == 0 && !split.dropped.empty(),
          fmt("%g round-trip failures over 1000 documents; %g leaking pairs, %g dropped", static_cast<double>(failures),
              static_cast<double>(leaks), static_cast<double>(split.dropped.size()))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"crf_correctness", crf_correctness},
      {"gradient_fidelity", gradient_fidelity},
      {"metric_oracle", metric_oracle},
      {"attack_invariants", attack_invariants},
      {"percentile_detectors", percentile_detectors},
      {"round_trip_integrity", round_trip},
      {"desk_scale_learning", learning_check},
      {"calibration_protocol", calibration_protocol},
      {"faithfulness_protocol", faithfulness_protocol},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
