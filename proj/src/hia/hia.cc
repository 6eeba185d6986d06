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

#include "segmark/hia/hia.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "segmark/infomask/infomask.h"
#include "segmark/stylometry/stylometry.h"
#include "segmark/text/rng.h"

namespace segmark::hia {

using nlohmann::json;

namespace {

json spans_json(const std::vector<Span>& spans) {
  json out = json::array();
  for (const Span& s : spans) out.push_back({s.start, s.end});
  return out;
}

std::vector<Span> spans_from_json(const json& j) {
  std::vector<Span> out;
  for (const auto& s : j) out.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
  return out;
}

constexpr std::array<const char*, 5> kChannelNames = {
    "perplexity", "pos_density", "punct_density", "lexical_diversity", "readability"};

}  // namespace

json HiaRecord::to_json() const {
  json heat = json::array();
  for (const auto& row : style_heatmap) heat.push_back(row);
  return {{"schema_version", kHiaSchemaVersion},
          {"doc_id", doc_id},
          {"tokens", tokens},
          {"mask", mask},
          {"attention_x_mask", attention_x_mask},
          {"style_channels", kChannelNames},
          {"style_heatmap", heat},
          {"pred_spans", spans_json(pred_spans)},
          {"pred_marginals", pred_marginals},
          {"gold_spans", gold_spans ? spans_json(*gold_spans) : json(nullptr)}};
}

HiaRecord HiaRecord::from_json(const json& j) {
  HiaRecord r;
  r.doc_id = j.at("doc_id").get<std::string>();
  r.tokens = j.at("tokens").get<std::vector<std::string>>();
  r.mask = j.at("mask").get<std::vector<double>>();
  r.attention_x_mask = j.at("attention_x_mask").get<std::vector<double>>();
  r.style_heatmap = j.at("style_heatmap").get<std::vector<std::array<double, 5>>>();
  r.pred_spans = spans_from_json(j.at("pred_spans"));
  r.pred_marginals = j.at("pred_marginals").get<std::vector<double>>();
  if (j.contains("gold_spans") && !j.at("gold_spans").is_null()) {
    r.gold_spans = spans_from_json(j.at("gold_spans"));
  }
  return r;
}

HiaRecord export_hia(const corpus::Document& doc, const model::Segmenter& model,
                     bool include_gold) {
  const model::Prediction pred = model.predict(doc);
  const stylometry::StyleMatrix style = stylometry::build_style_matrix(doc, model.style);
  HiaRecord r;
  r.doc_id = doc.id;
  for (const auto& t : doc.tokens) r.tokens.push_back(t.text);
  r.mask = pred.mask;
  r.attention_x_mask = pred.attention_x_mask;
  r.style_heatmap.resize(style.rows);
  for (std::size_t t = 0; t < style.rows; ++t) {
    for (std::size_t f = 0; f < stylometry::kStyleDim; ++f) r.style_heatmap[t][f] = style.at(t, f);
  }
  r.pred_spans = pred.spans;
  r.pred_marginals = pred.probs;
  if (include_gold) r.gold_spans = doc.gold_spans;
  return r;
}

json Correction::to_json() const {
  return {{"doc_id", doc_id},
          {"reviewer_id", reviewer_id},
          {"corrected_spans", spans_json(corrected_spans)},
          {"rating_boundary", rating_boundary},
          {"rating_hia", rating_hia},
          {"elapsed_ms", elapsed_ms}};
}

Correction parse_correction(const json& j, const corpus::Document* doc) {
  if (!j.is_object()) throw ValidationError("$", "correction must be a JSON object");
  const auto require = [&j](const char* field) -> const json& {
    if (!j.contains(field)) throw ValidationError(field, std::string("missing field ") + field);
    return j.at(field);
  };
  Correction c;
  for (const char* field : {"doc_id", "reviewer_id"}) {
    const json& v = require(field);
    if (!v.is_string() || v.get<std::string>().empty()) {
      throw ValidationError(field, std::string(field) + " must be a non-empty string");
    }
  }
  c.doc_id = j.at("doc_id").get<std::string>();
  c.reviewer_id = j.at("reviewer_id").get<std::string>();

  for (const char* field : {"rating_boundary", "rating_hia"}) {
    const json& v = require(field);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > 5) {
      throw ValidationError(field, std::string(field) + " must be an integer in [1, 5]");
    }
  }
  c.rating_boundary = j.at("rating_boundary").get<int>();
  c.rating_hia = j.at("rating_hia").get<int>();

  const json& elapsed = require("elapsed_ms");
  if (!elapsed.is_number_integer() || elapsed.get<std::int64_t>() < 0) {
    throw ValidationError("elapsed_ms", "elapsed_ms must be a non-negative integer");
  }
  c.elapsed_ms = elapsed.get<std::int64_t>();

  const json& spans = require("corrected_spans");
  if (!spans.is_array()) throw ValidationError("corrected_spans", "corrected_spans must be an array");
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const std::string path = "corrected_spans[" + std::to_string(i) + "]";
    const json& s = spans[i];
    const auto non_negative = [](const json& v) {
      return v.is_number_integer() && (v.is_number_unsigned() || v.get<std::int64_t>() >= 0);
    };
    if (!s.is_array() || s.size() != 2 || !non_negative(s[0]) || !non_negative(s[1])) {
      throw ValidationError(path, "span must be [start, end] with non-negative integers");
    }
    const Span span{s[0].get<std::size_t>(), s[1].get<std::size_t>()};
    if (span.start >= span.end) throw ValidationError(path, "span must be non-empty");
    if (!c.corrected_spans.empty() && span.start < c.corrected_spans.back().end) {
      throw ValidationError(path, "spans must be sorted and disjoint");
    }
    if (doc && span.end > doc->size()) {
      throw ValidationError(path, "span extends past the document's " +
                                      std::to_string(doc->size()) + " tokens");
    }
    c.corrected_spans.push_back(span);
  }
  return c;
}

void CorrectionJournal::append(const Correction& c) {
  const std::string line = c.to_json().dump() + "\n";
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open journal " + path_.string());
  out << line;
  out.flush();
  if (!out) throw std::runtime_error("journal write failed for " + path_.string());
}

std::vector<Correction> CorrectionJournal::read_all() const {
  std::lock_guard lock(mu_);
  std::vector<Correction> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_correction(json::parse(line), nullptr));
    } catch (const std::exception& e) {
      throw std::runtime_error(path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

SpanStore apply_corrections(const SpanStore& predictions,
                            const std::vector<Correction>& corrections) {
  SpanStore out = predictions;
  for (const Correction& c : corrections) out[c.doc_id] = c.corrected_spans;
  return out;
}

json CorrectionReport::to_json() const {
  return {{"before", before.to_json()},
          {"after", after.to_json()},
          {"corrections", corrections},
          {"documents_changed", documents_changed}};
}

CorrectionReport correction_report(const std::vector<corpus::Document>& docs,
                                   const SpanStore& predictions,
                                   const std::vector<Correction>& corrections) {
  const SpanStore revised = apply_corrections(predictions, corrections);
  std::vector<evalkit::DocPair> before, after;
  CorrectionReport r;
  r.corrections = corrections.size();
  const auto pair_for = [](const corpus::Document& d, const std::vector<Span>& pred) {
    evalkit::DocPair p;
    p.gold = d.gold_spans;
    p.pred = pred;
    p.gold_labels = d.labels;
    p.pred_labels = corpus::labels_from_spans(pred, d.size());
    return p;
  };
  for (const auto& d : docs) {
    const auto it = predictions.find(d.id);
    const std::vector<Span> base = it == predictions.end() ? std::vector<Span>{} : it->second;
    const std::vector<Span>& now = revised.at(d.id);
    if (base != now) ++r.documents_changed;
    before.push_back(pair_for(d, base));
    after.push_back(pair_for(d, now));
  }
  r.before = evalkit::evaluate(before);
  r.after = evalkit::evaluate(after);
  return r;
}

ArtifactCache::ArtifactCache(std::filesystem::path dir, std::string checkpoint_hash)
    : dir_(std::move(dir)), checkpoint_hash_(std::move(checkpoint_hash)) {
  std::filesystem::create_directories(dir_);
}

std::string ArtifactCache::key(const std::string& doc_id) const {
  char buf[17];
  const std::uint64_t h = text::fnv1a64(checkpoint_hash_, text::fnv1a64(doc_id + '\x1f'));
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<json> ArtifactCache::get(const std::string& doc_id) const {
  std::ifstream in(dir_ / (key(doc_id) + ".json"));
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    // Guards against key collisions and entries from another checkpoint.
    if (j.value("doc_id", "") != doc_id || j.value("checkpoint", "") != checkpoint_hash_ ||
        !j.contains("value")) {
      return std::nullopt;
    }
    return j["value"];
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void ArtifactCache::put(const std::string& doc_id, const json& value) const {
  const auto final_path = dir_ / (key(doc_id) + ".json");
  const auto tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp);
    out << json{{"doc_id", doc_id}, {"checkpoint", checkpoint_hash_}, {"value", value}}.dump();
  }
  std::filesystem::rename(tmp, final_path);
}

HiaService::HiaService(std::vector<corpus::Document> docs, model::Segmenter model,
                       std::string checkpoint_hash, std::filesystem::path state_dir)
    : docs_(std::move(docs)),
      model_(std::move(model)),
      checkpoint_hash_(std::move(checkpoint_hash)),
      cache_(state_dir / "cache", checkpoint_hash_),
      journal_(state_dir / "corrections.jsonl") {
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (!index_.emplace(docs_[i].id, i).second) {
      throw std::invalid_argument("duplicate document id " + docs_[i].id);
    }
  }
}

const corpus::Document* HiaService::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &docs_[it->second];
}

json HiaService::artifacts(const corpus::Document& doc) const {
  std::lock_guard lock(cache_mu_);
  if (auto it = memo_.find(doc.id); it != memo_.end()) return it->second;
  std::optional<json> cached = cache_.get(doc.id);
  if (!cached) {
    const model::Prediction pred = model_.predict(doc);
    json p = {{"labels", pred.labels},
              {"spans", spans_json(pred.spans)},
              {"probs", pred.probs}};
    cached = json{{"prediction", p}, {"hia", export_hia(doc, model_).to_json()}};
    cache_.put(doc.id, *cached);
  }
  memo_.emplace(doc.id, *cached);
  return *cached;
}

namespace {

Response not_found(const std::string& id) {
  return {404, {{"error", "unknown document " + id}, {"field", "doc_id"}}};
}

}  // namespace

Response HiaService::list_docs(const std::string& split, std::size_t offset,
                               std::size_t limit) const {
  if (!split.empty()) {
    try {
      corpus::parse_split(split);
    } catch (const std::exception&) {
      return {400, {{"error", "unknown split " + split}, {"field", "split"}}};
    }
  }
  limit = std::min(limit == 0 ? kDefaultPageSize : limit, kMaxPageSize);
  json items = json::array();
  std::size_t total = 0;
  for (const auto& d : docs_) {
    if (!split.empty() && corpus::split_name(d.meta.split) != split) continue;
    if (total >= offset && items.size() < limit) {
      items.push_back({{"id", d.id},
                       {"split", corpus::split_name(d.meta.split)},
                       {"domain", d.meta.domain},
                       {"tokens", d.size()}});
    }
    ++total;
  }
  return {200, {{"total", total}, {"offset", offset}, {"limit", limit}, {"items", items}}};
}

Response HiaService::get_doc(const std::string& id) const {
  const corpus::Document* d = find(id);
  if (!d) return not_found(id);
  const json a = artifacts(*d);
  return {200, {{"document", corpus::to_json(*d)},
                {"prediction", a.at("prediction")},
                {"checkpoint", checkpoint_hash_}}};
}

Response HiaService::get_hia(const std::string& id) const {
  const corpus::Document* d = find(id);
  if (!d) return not_found(id);
  return {200, artifacts(*d).at("hia")};
}

Response HiaService::post_correction(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    return {400, {{"error", "body is not valid JSON"}, {"field", "$"}}};
  }
  try {
    const Correction shape = parse_correction(j, nullptr);
    const corpus::Document* d = find(shape.doc_id);
    if (!d) return not_found(shape.doc_id);
    const Correction c = parse_correction(j, d);
    journal_.append(c);
    return {201, c.to_json()};
  } catch (const ValidationError& e) {
    return {400, {{"error", e.what()}, {"field", e.field()}}};
  }
}

Response HiaService::report() const {
  SpanStore preds;
  for (const auto& d : docs_) preds[d.id] = spans_from_json(artifacts(d).at("prediction").at("spans"));
  return {200, correction_report(docs_, preds, journal_.read_all()).to_json()};
}

}  // namespace segmark::hia
