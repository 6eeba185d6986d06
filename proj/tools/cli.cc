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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "segmark/attacks/attacks.h"
#include "segmark/baselines/baselines.h"
#include "segmark/corpus/corpus.h"
#include "segmark/corpus/synthetic.h"
#include "segmark/evalkit/calibration.h"
#include "segmark/evalkit/faithfulness.h"
#include "segmark/evalkit/metrics.h"
#include "segmark/hia/http.h"
#include "segmark/model/checkpoint.h"

namespace segmark::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const std::string& path, const json& j, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

std::vector<json> read_json_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_json_lines(const std::string& path, const std::vector<json>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& r : rows) out << r.dump() << "\n";
}

json spans_json(const std::vector<corpus::Span>& spans) {
  json a = json::array();
  for (const auto& s : spans) a.push_back({s.start, s.end});
  return a;
}

json prediction_json(const std::string& id, const std::vector<int>& labels,
                     const std::vector<double>& probs) {
  json j = {{"id", id}, {"labels", labels}, {"spans", spans_json(corpus::spans_from_labels(labels))}};
  if (!probs.empty()) j["probs"] = probs;
  return j;
}

std::vector<double> parse_taus(const std::string& s) {
  std::vector<double> taus;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || !(v > 0.0 && v <= 1.0)) {
      throw std::invalid_argument("--taus entries must lie in (0, 1]: " + item);
    }
    taus.push_back(v);
  }
  if (taus.empty()) throw std::invalid_argument("--taus is empty");
  return taus;
}

std::vector<corpus::Document> load_docs(const std::string& path, const std::string& format) {
  if (format == "tagged") return corpus::read_tagged_file(path);
  if (format == "jsonl") return corpus::read_jsonl(path);
  throw std::invalid_argument("unknown format " + format);
}

stylometry::NgramLM lm_for(const std::string& model_path, const std::string& lm_train) {
  if (!model_path.empty()) return model::load_checkpoint(model_path).style.lm;
  if (!lm_train.empty()) return stylometry::NgramLM::train(corpus::read_jsonl(lm_train), 3, 0.1);
  throw std::invalid_argument("need --model or --lm-train for the language model");
}

}  // namespace

void apply_config(const config::Table& table, model::ModelConfig& m, model::TrainConfig& t) {
  static const std::set<std::string> known = {
      "model.use_infomask", "model.gate_internal", "model.embed_dim", "model.hidden",
      "model.hash_buckets", "model.style_hidden", "model.heads", "model.max_seq_len",
      "model.chunk_overlap", "train.batch_size", "train.epochs", "train.weight_decay",
      "train.grad_clip", "train.dropout_start", "train.dropout_end", "train.warmup_fraction",
      "train.patience", "train.lr_scale", "train.layer_decay", "train.lr_embedding",
      "train.lr_recurrence", "train.lr_infomask", "train.lr_crf", "train.seed", "train.threads",
      "train.lm_order", "train.lm_smoothing", "train.style_window"};
  for (const auto& [key, value] : table.values()) {
    if (!known.count(key)) throw std::invalid_argument("unknown config key " + key);
  }
  const auto i = [&table](const char* k, auto fallback) {
    return static_cast<decltype(fallback)>(table.get_int(k, static_cast<std::int64_t>(fallback)));
  };
  m.use_infomask = table.get_bool("model.use_infomask", m.use_infomask);
  m.gate_internal = table.get_bool("model.gate_internal", m.gate_internal);
  m.embed_dim = i("model.embed_dim", m.embed_dim);
  m.hidden = i("model.hidden", m.hidden);
  m.hash_buckets = i("model.hash_buckets", m.hash_buckets);
  m.mask.hidden = i("model.style_hidden", m.mask.hidden);
  m.mask.heads = i("model.heads", m.mask.heads);
  m.max_seq_len = i("model.max_seq_len", m.max_seq_len);
  m.chunk_overlap = i("model.chunk_overlap", m.chunk_overlap);
  if (m.embed_dim <= 0 || m.hidden <= 0 || m.hash_buckets == 0 || m.mask.hidden <= 0 ||
      m.mask.heads <= 0 || m.chunk_overlap < 0 || m.chunk_overlap >= m.max_seq_len) {
    throw std::invalid_argument("invalid [model] dimensions");
  }

  t.batch_size = i("train.batch_size", t.batch_size);
  t.epochs = i("train.epochs", t.epochs);
  t.weight_decay = table.get_double("train.weight_decay", t.weight_decay);
  t.grad_clip = table.get_double("train.grad_clip", t.grad_clip);
  t.dropout_start = table.get_double("train.dropout_start", t.dropout_start);
  t.dropout_end = table.get_double("train.dropout_end", t.dropout_end);
  t.warmup_fraction = table.get_double("train.warmup_fraction", t.warmup_fraction);
  t.patience = i("train.patience", t.patience);
  t.lr_scale = table.get_double("train.lr_scale", t.lr_scale);
  t.layer_decay = table.get_double("train.layer_decay", t.layer_decay);
  t.lr_ladder[0] = table.get_double("train.lr_embedding", t.lr_ladder[0]);
  t.lr_ladder[1] = table.get_double("train.lr_recurrence", t.lr_ladder[1]);
  t.lr_ladder[2] = table.get_double("train.lr_infomask", t.lr_ladder[2]);
  t.lr_ladder[3] = table.get_double("train.lr_crf", t.lr_ladder[3]);
  t.seed = static_cast<std::uint64_t>(table.get_int("train.seed", static_cast<std::int64_t>(t.seed)));
  t.threads = i("train.threads", t.threads);
  t.lm_order = i("train.lm_order", t.lm_order);
  t.lm_smoothing = table.get_double("train.lm_smoothing", t.lm_smoothing);
  t.style.window = i("train.style_window", t.style.window);
  t.validate();
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"segmark: mixed-authorship boundary detection"};
  app.require_subcommand(1);

  // ingest
  std::string in, outp, format = "jsonl", domain = "unknown", generator = "unknown";
  auto* ingest = app.add_subcommand("ingest", "Parse tagged text or JSONL into canonical JSONL");
  ingest->add_option("--in", in, "Input path")->required();
  ingest->add_option("--format", format, "tagged|jsonl")->check(CLI::IsMember({"tagged", "jsonl"}));
  ingest->add_option("--out", outp, "Output JSONL")->required();
  ingest->add_option("--domain", domain, "meta.domain for tagged input");
  ingest->add_option("--generator", generator, "meta.generator for tagged input");

  // split
  std::uint64_t seed = 0;
  int ngram = 3;
  double overlap = 0.3;
  std::string out_dir, stratify;
  auto* split = app.add_subcommand("split", "70/20/10 split with n-gram hygiene");
  split->add_option("--in", in)->required();
  split->add_option("--seed", seed);
  split->add_option("--ngram", ngram);
  split->add_option("--overlap", overlap);
  split->add_option("--out-dir", out_dir)->required();
  split->add_option("--stratify", stratify, "meta.domain, meta.generator or meta.attack");

  // attack
  std::string kind;
  double rate = 0.15;
  auto* attack = app.add_subcommand("attack", "Apply a surface perturbation");
  attack->add_option("--in", in)->required();
  attack->add_option("--kind", kind, "attack name or 'all'")->required();
  attack->add_option("--rate", rate);
  attack->add_option("--seed", seed);
  attack->add_option("--out", outp, "Output JSONL, or a directory with --kind all")->required();

  // featurize
  std::string model_path, train_path;
  auto* featurize = app.add_subcommand("featurize", "Per-token stylometric features");
  featurize->add_option("--in", in)->required();
  featurize->add_option("--model", model_path, "Checkpoint whose extractor to use");
  featurize->add_option("--train", train_path, "Fit a fresh extractor on this JSONL");
  featurize->add_option("--out", outp)->required();

  // train
  std::string config_path, data_dir, log_path;
  auto* train = app.add_subcommand("train", "Train a segmenter");
  train->add_option("--config", config_path, "TOML config");
  train->add_option("--data", data_dir, "Directory with train.jsonl and valid.jsonl")->required();
  train->add_option("--out", outp, "Checkpoint path")->required();
  train->add_option("--log", log_path, "Training log JSON");

  // predict
  auto* predict = app.add_subcommand("predict", "Label documents with a checkpoint");
  predict->add_option("--model", model_path)->required();
  predict->add_option("--in", in)->required();
  predict->add_option("--out", outp)->required();

  // baseline
  std::string method, lm_train, partition = "sentence", scorer_name = "surprisal";
  std::size_t cell = 16;
  double threshold = 0.5;
  auto* baseline = app.add_subcommand("baseline", "Zero-training detectors");
  baseline->add_option("--method", method)->required()->check(CLI::IsMember({"logp", "entropy", "spanscore"}));
  baseline->add_option("--in", in)->required();
  baseline->add_option("--out", outp)->required();
  baseline->add_option("--model", model_path, "Take the language model from a checkpoint");
  baseline->add_option("--lm-train", lm_train, "Fit a trigram LM on this JSONL");
  baseline->add_option("--partition", partition)->check(CLI::IsMember({"sentence", "fixed"}));
  baseline->add_option("--k", cell, "Cell width for --partition fixed");
  baseline->add_option("--threshold", threshold);
  baseline->add_option("--scorer", scorer_name)->check(CLI::IsMember({"surprisal", "gold"}));

  // evaluate
  std::string gold_path, pred_path, taus = "0.3,0.5,0.7,0.9", matching = "existence";
  auto* evaluate = app.add_subcommand("evaluate", "Span and token metrics");
  evaluate->add_option("--gold", gold_path)->required();
  evaluate->add_option("--pred", pred_path)->required();
  evaluate->add_option("--taus", taus);
  evaluate->add_option("--matching", matching)->check(CLI::IsMember({"existence", "greedy"}));
  evaluate->add_option("--out", outp);

  // calibrate
  std::string valid_path;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the temperature on validation data");
  calibrate->add_option("--model", model_path)->required();
  calibrate->add_option("--valid", valid_path)->required();
  calibrate->add_option("--out", outp, "Write the calibrated checkpoint here (default: in place)");

  // faithfulness
  double k_fraction = 0.10;
  std::string mode = "mask", which = "both";
  auto* faith = app.add_subcommand("faithfulness", "Perturb high/low mask tokens and re-score");
  faith->add_option("--model", model_path)->required();
  faith->add_option("--in", in)->required();
  faith->add_option("--k", k_fraction);
  faith->add_option("--mode", mode)->check(CLI::IsMember({"mask", "shuffle"}));
  faith->add_option("--which", which)->check(CLI::IsMember({"top", "bottom", "both"}));
  faith->add_option("--seed", seed);
  faith->add_option("--out", outp);

  // hia
  auto* hia_cmd = app.add_subcommand("hia", "Export attribution records");
  hia_cmd->add_option("--in", in)->required();
  hia_cmd->add_option("--model", model_path)->required();
  hia_cmd->add_option("--out", out_dir)->required();

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP API for the review UI");
  serve->add_option("--data", data_dir, "Directory of JSONL documents; also holds the journal")->required();
  serve->add_option("--model", model_path)->required();
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  // synth
  std::size_t n_docs = 2000;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic mixed-authorship corpus");
  synth->add_option("--docs", n_docs);
  synth->add_option("--seed", seed);
  synth->add_option("--out", outp)->required();

  std::vector<std::string> args(args_in.rbegin(), args_in.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (ingest->parsed()) {
      auto docs = load_docs(in, format);
      if (format == "tagged") {
        for (auto& d : docs) {
          d.meta.domain = domain;
          d.meta.generator = generator;
        }
      }
      corpus::write_jsonl(outp, docs);
      out << "wrote " << docs.size() << " documents to " << outp << "\n";
    } else if (split->parsed()) {
      corpus::SplitOptions so;
      so.seed = seed;
      so.ngram_n = ngram;
      so.overlap_threshold = overlap;
      so.stratify_key = stratify.rfind("meta.", 0) == 0 ? stratify.substr(5) : stratify;
      const auto res = corpus::split_corpus(corpus::read_jsonl(in), so);
      fs::create_directories(out_dir);
      corpus::write_jsonl((fs::path(out_dir) / "train.jsonl").string(), res.train);
      corpus::write_jsonl((fs::path(out_dir) / "valid.jsonl").string(), res.valid);
      corpus::write_jsonl((fs::path(out_dir) / "test.jsonl").string(), res.test);
      std::vector<json> dropped;
      for (const auto& d : res.dropped) {
        dropped.push_back({{"id", d.id},
                           {"split", corpus::split_name(d.split)},
                           {"conflicting_id", d.conflicting_id},
                           {"conflicting_split", corpus::split_name(d.conflicting_split)},
                           {"jaccard", d.jaccard}});
        err << "dropped " << d.id << " (" << corpus::split_name(d.split) << "): Jaccard "
            << d.jaccard << " with " << d.conflicting_id << "\n";
      }
      write_json_lines((fs::path(out_dir) / "dropped.jsonl").string(), dropped);
      out << "train " << res.train.size() << ", valid " << res.valid.size() << ", test "
          << res.test.size() << ", dropped " << res.dropped.size() << "\n";
    } else if (attack->parsed()) {
      const auto docs = corpus::read_jsonl(in);
      const auto attack_all = [&](attacks::AttackKind k) {
        std::vector<corpus::Document> outd;
        for (const auto& d : docs) outd.push_back(attacks::apply_attack(d, {k, rate, seed}));
        return outd;
      };
      if (kind == "all") {
        fs::create_directories(outp);
        corpus::write_jsonl((fs::path(outp) / "clean.jsonl").string(), docs);
        for (attacks::AttackKind k : attacks::kAllAttacks) {
          corpus::write_jsonl((fs::path(outp) / (std::string(attacks::attack_name(k)) + ".jsonl")).string(),
                              attack_all(k));
        }
        out << "wrote " << attacks::kAllAttacks.size() + 1 << " variants to " << outp << "\n";
      } else {
        corpus::write_jsonl(outp, attack_all(attacks::parse_attack(kind)));
        out << "wrote " << docs.size() << " documents to " << outp << "\n";
      }
    } else if (featurize->parsed()) {
      stylometry::StyleExtractor ex;
      if (!model_path.empty()) {
        ex = model::load_checkpoint(model_path).style;
      } else if (!train_path.empty()) {
        ex = stylometry::StyleExtractor::fit(corpus::read_jsonl(train_path));
      } else {
        throw std::invalid_argument("featurize needs --model or --train");
      }
      std::vector<json> rows;
      for (const auto& d : corpus::read_jsonl(in)) {
        rows.push_back({{"id", d.id},
                        {"styles", stylometry::style_matrix_json(stylometry::build_style_matrix(d, ex))}});
      }
      write_json_lines(outp, rows);
      out << "wrote " << rows.size() << " feature matrices to " << outp << "\n";
    } else if (train->parsed()) {
      model::ModelConfig mc;
      model::TrainConfig tc;
      if (!config_path.empty()) apply_config(config::Table::load(config_path), mc, tc);
      const auto tr = corpus::read_jsonl((fs::path(data_dir) / "train.jsonl").string());
      const auto va = corpus::read_jsonl((fs::path(data_dir) / "valid.jsonl").string());
      const auto result = model::train(tr, va, mc, tc, [&out](const model::EpochStats& e) {
        out << "epoch " << e.epoch << ": loss " << e.train_loss << ", valid SBDA@0.3 "
            << e.valid_sbda << ", " << e.seconds << "s\n";
      });
      const json meta = {{"train", model::to_json(tc)}, {"log", result.log.to_json()}};
      model::save_checkpoint(outp, result.model, meta);
      if (!log_path.empty()) write_json(log_path, result.log.to_json(), out);
      out << "best epoch " << result.log.best_epoch << " (valid SBDA@0.3 "
          << result.log.best_valid_sbda << "), saved " << outp << "\n";
    } else if (predict->parsed()) {
      const auto m = model::load_checkpoint(model_path);
      std::vector<json> rows;
      for (const auto& d : corpus::read_jsonl(in)) {
        const auto p = m.predict(d);
        rows.push_back(prediction_json(d.id, p.labels, p.probs));
      }
      write_json_lines(outp, rows);
      out << "wrote " << rows.size() << " predictions to " << outp << "\n";
    } else if (baseline->parsed()) {
      const auto docs = corpus::read_jsonl(in);
      std::vector<json> rows;
      std::size_t failures = 0;
      if (method == "spanscore") {
        std::unique_ptr<baselines::SpanScorer> scorer;
        std::optional<stylometry::StyleExtractor> ex;
        if (scorer_name == "gold") {
          scorer = std::make_unique<baselines::GoldFractionScorer>();
        } else {
          ex = model_path.empty() ? stylometry::StyleExtractor::fit(corpus::read_jsonl(lm_train))
                                  : model::load_checkpoint(model_path).style;
          scorer = std::make_unique<baselines::SurprisalScorer>(ex->lm, ex->surprisal_scale);
        }
        baselines::PartitionOptions po;
        po.kind = partition == "fixed" ? baselines::Partition::kFixedK : baselines::Partition::kSentence;
        po.k = cell;
        for (const auto& d : docs) {
          const auto r = baselines::span_score_adapt(d, *scorer, po, threshold);
          for (const auto& f : r.failures) {
            err << d.id << " [" << f.span.start << "," << f.span.end << "): " << f.message << "\n";
          }
          failures += r.failures.size();
          rows.push_back(prediction_json(d.id, r.labels, {}));
        }
      } else {
        const auto lm = lm_for(model_path, lm_train);
        for (const auto& d : docs) {
          rows.push_back(prediction_json(
              d.id, method == "logp" ? baselines::logp_detect(d, lm) : baselines::entropy_detect(d, lm), {}));
        }
      }
      write_json_lines(outp, rows);
      out << "wrote " << rows.size() << " predictions to " << outp;
      if (failures) out << " (" << failures << " span scorer failures)";
      out << "\n";
    } else if (evaluate->parsed()) {
      const auto gold = corpus::read_jsonl(gold_path);
      std::map<std::string, json> preds;
      for (auto& row : read_json_lines(pred_path)) preds[row.at("id").get<std::string>()] = row;
      std::vector<evalkit::DocPair> pairs;
      for (const auto& d : gold) {
        const auto it = preds.find(d.id);
        if (it == preds.end()) throw std::runtime_error("no prediction for document " + d.id);
        evalkit::DocPair p;
        p.gold = d.gold_spans;
        p.gold_labels = d.labels;
        p.pred_labels = it->second.at("labels").get<std::vector<int>>();
        if (p.pred_labels.size() != d.size()) {
          throw std::runtime_error("prediction for " + d.id + " has the wrong length");
        }
        p.pred = corpus::spans_from_labels(p.pred_labels);
        if (it->second.contains("probs")) p.probs = it->second.at("probs").get<std::vector<double>>();
        pairs.push_back(std::move(p));
      }
      evalkit::EvalOptions eo;
      eo.taus = parse_taus(taus);
      eo.matching = matching == "greedy" ? evalkit::Matching::kGreedyOneToOne : evalkit::Matching::kExistence;
      write_json(outp, evalkit::evaluate(pairs, eo).to_json(), out);
    } else if (calibrate->parsed()) {
      json meta;
      auto m = model::load_checkpoint(model_path, &meta);
      std::vector<double> probs;
      std::vector<int> labels;
      for (const auto& d : corpus::read_jsonl(valid_path)) {
        const auto p = m.predict(d);
        probs.insert(probs.end(), p.raw_probs.begin(), p.raw_probs.end());
        labels.insert(labels.end(), d.labels.begin(), d.labels.end());
      }
      const auto fit = evalkit::fit_temperature(probs, labels);
      const auto scaled = evalkit::apply_temperature(probs, fit.temperature);
      m.temperature = fit.temperature;
      model::save_checkpoint(outp.empty() ? model_path : outp, m, meta);
      write_json("", {{"temperature", fit.temperature},
                      {"nll_before", fit.nll_before},
                      {"nll_after", fit.nll_after},
                      {"ece_before", evalkit::ece(probs, labels)},
                      {"ece_after", evalkit::ece(scaled, labels)},
                      {"brier_before", evalkit::brier(probs, labels)},
                      {"brier_after", evalkit::brier(scaled, labels)}},
                 out);
    } else if (faith->parsed()) {
      const auto m = model::load_checkpoint(model_path);
      const auto docs = corpus::read_jsonl(in);
      evalkit::FaithfulnessOptions fo;
      fo.k_fraction = k_fraction;
      fo.mode = mode == "shuffle" ? evalkit::PerturbMode::kShuffle : evalkit::PerturbMode::kMask;
      fo.seed = seed;
      json report;
      for (const char* w : {"top", "bottom"}) {
        if (which != "both" && which != w) continue;
        fo.which = std::string(w) == "top" ? evalkit::Rank::kTop : evalkit::Rank::kBottom;
        report[w] = evalkit::faithfulness(m, docs, fo).to_json();
      }
      write_json(outp, report, out);
    } else if (hia_cmd->parsed()) {
      const auto m = model::load_checkpoint(model_path);
      fs::create_directories(out_dir);
      std::size_t n = 0;
      for (const auto& d : corpus::read_jsonl(in)) {
        std::string safe = d.id;
        for (char& c : safe) {
          if (c == '/' || c == '\\') c = '_';
        }
        std::ofstream f(fs::path(out_dir) / (safe + ".hia.json"));
        f << hia::export_hia(d, m).to_json().dump() << "\n";
        ++n;
      }
      out << "wrote " << n << " HIA records to " << out_dir << "\n";
    } else if (serve->parsed()) {
      std::vector<corpus::Document> docs;
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(data_dir)) {
        if (e.path().extension() == ".jsonl" && e.path().filename() != "corrections.jsonl" &&
            e.path().filename() != "dropped.jsonl") {
          files.push_back(e.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        auto part = corpus::read_jsonl(f.string());
        docs.insert(docs.end(), part.begin(), part.end());
      }
      hia::HiaService service(std::move(docs), model::load_checkpoint(model_path),
                              model::checkpoint_file_hash(model_path), data_dir);
      out << "serving " << files.size() << " files on http://" << host << ":" << port << "\n";
      out.flush();
      if (!hia::serve(service, host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    } else if (synth->parsed()) {
      corpus::SynthConfig sc;
      sc.documents = n_docs;
      sc.seed = seed;
      const auto docs = corpus::generate_synthetic(sc);
      corpus::write_jsonl(outp, docs);
      out << "wrote " << docs.size() << " documents to " << outp << "\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace segmark::cli
