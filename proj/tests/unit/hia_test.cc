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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gradcheck.h"
#include "oracles.h"
#include "schema_check.h"

namespace segmark::hia {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// A fresh directory removed when the test ends.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("segmark_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<corpus::Document> sample_docs() {
  std::vector<corpus::Document> docs = {
      corpus::parse_tagged("We walked home. <AI_Start>The evening was notably serene.</AI_End> Then we slept.", "a"),
      corpus::parse_tagged("<AI_Start>Everything here is generated text.</AI_End>", "b"),
      corpus::parse_tagged("Just a person writing.", "c")};
  docs[1].meta.split = corpus::Split::kTest;
  return docs;
}

model::Segmenter segmenter(bool zero) {
  text::Rng rng(3);
  model::Segmenter s;
  const auto c = gradcheck::tiny_config(false);
  s.params = zero ? model::ModelParams::zeros(c) : gradcheck::random_params(c, rng);
  s.style = stylometry::StyleExtractor::fit(sample_docs());
  return s;
}

json good_correction(const std::string& id = "a") {
  return {{"doc_id", id},
          {"reviewer_id", "r1"},
          {"corrected_spans", json::array({json::array({3, 8})})},
          {"rating_boundary", 4},
          {"rating_hia", 3},
          {"elapsed_ms", 1200}};
}

std::string field_of(const json& j, const corpus::Document* doc) {
  try {
    parse_correction(j, doc);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

TEST_CASE("a zero-weight model gives a neutral mask and no attention") {
  const auto docs = sample_docs();
  const HiaRecord r = export_hia(docs[0], segmenter(true));
  REQUIRE(r.mask.size() == docs[0].size());
  for (double m : r.mask) CHECK(m == 0.5);
  for (double a : r.attention_x_mask) CHECK(a == 0.0);
  CHECK(r.tokens.size() == docs[0].size());
  CHECK(r.style_heatmap.size() == docs[0].size());
}

TEST_CASE("records round trip and conform to the schema") {
  const json schema = schema::load(std::string(SEGMARK_SCHEMA_DIR) + "/hia_record.v1.json");
  const auto docs = sample_docs();
  const auto model = segmenter(false);
  for (const auto& d : docs) {
    for (bool gold : {true, false}) {
      const HiaRecord r = export_hia(d, model, gold);
      const json j = r.to_json();
      CHECK(schema::violation(j, schema) == "");
      CHECK(HiaRecord::from_json(j) == r);
      CHECK(r.gold_spans.has_value() == gold);
    }
  }
  json broken = export_hia(docs[0], model).to_json();
  broken["style_heatmap"][0].push_back(0.5);
  CHECK(schema::violation(broken, schema) != "");
}

TEST_CASE("corrections are validated field by field") {
  const auto docs = sample_docs();
  const json schema = schema::load(std::string(SEGMARK_SCHEMA_DIR) + "/correction.v1.json");
  const Correction c = parse_correction(good_correction(), &docs[0]);
  CHECK(c.corrected_spans == std::vector<Span>{{3, 8}});
  CHECK(schema::violation(c.to_json(), schema) == "");
  CHECK(parse_correction(c.to_json(), &docs[0]) == c);

  CHECK(field_of(json::array(), nullptr) == "$");
  json j = good_correction();
  j.erase("reviewer_id");
  CHECK(field_of(j, nullptr) == "reviewer_id");
  j = good_correction();
  j["doc_id"] = "";
  CHECK(field_of(j, nullptr) == "doc_id");
  j = good_correction();
  j["rating_hia"] = 6;
  CHECK(field_of(j, nullptr) == "rating_hia");
  j["rating_hia"] = 2.5;
  CHECK(field_of(j, nullptr) == "rating_hia");
  j = good_correction();
  j["elapsed_ms"] = -1;
  CHECK(field_of(j, nullptr) == "elapsed_ms");
  j = good_correction();
  j["corrected_spans"] = json::array({json::array({0, 2}), json::array({1, 3})});
  CHECK(field_of(j, nullptr) == "corrected_spans[1]");
  j["corrected_spans"] = json::array({json::array({2, 2})});
  CHECK(field_of(j, nullptr) == "corrected_spans[0]");
  j["corrected_spans"] = json::array({json::array({-1, 2})});
  CHECK(field_of(j, nullptr) == "corrected_spans[0]");
  j["corrected_spans"] = json::array({json::array({0, 99})});
  CHECK(field_of(j, nullptr) == "");
  CHECK(field_of(j, &docs[0]) == "corrected_spans[0]");
  j["corrected_spans"] = json::array();
  CHECK(field_of(j, &docs[0]) == "");
}

TEST_CASE("the last correction for a document wins") {
  SpanStore preds = {{"a", {{0, 1}}}, {"b", {}}};
  Correction first, second;
  first.doc_id = second.doc_id = "a";
  first.corrected_spans = {{1, 2}};
  second.corrected_spans = {{2, 3}};
  const SpanStore out = apply_corrections(preds, {first, second});
  CHECK(out.at("a") == std::vector<Span>{{2, 3}});
  CHECK(out.at("b").empty());
}

TEST_CASE("correction reports") {
  const auto docs = sample_docs();
  SpanStore preds = {{"a", {}}, {"b", {}}, {"c", {}}};
  const CorrectionReport none = correction_report(docs, preds, {});
  CHECK(none.before.to_json() == none.after.to_json());
  CHECK(none.documents_changed == 0);

  Correction fix;
  fix.doc_id = "a";
  fix.corrected_spans = docs[0].gold_spans;
  const CorrectionReport fixed = correction_report(docs, preds, {fix});
  CHECK(fixed.documents_changed == 1);
  CHECK(fixed.after.sbda.at(0.5) > fixed.before.sbda.at(0.5));
  CHECK(evalkit::sbda(docs[0].gold_spans, apply_corrections(preds, {fix}).at("a"), 0.9) == 1.0);
}

TEST_CASE("partial corrections move SBDA with their overlap") {
  // Gold (3, 8) in document a. Each candidate is compared with the oracle.
  const auto docs = sample_docs();
  const SpanStore preds = {{"a", {{0, 2}}}, {"b", docs[1].gold_spans}, {"c", {}}};
  const double base = oracle::brute_sbda(docs[0].gold_spans, {{0, 2}}, 0.5);
  for (const std::vector<Span>& cand : {std::vector<Span>{{3, 6}}, std::vector<Span>{{4, 9}},
                                        std::vector<Span>{{0, 1}}, std::vector<Span>{{5, 11}}}) {
    Correction c;
    c.doc_id = "a";
    c.corrected_spans = cand;
    const CorrectionReport r = correction_report(docs, preds, {c});
    const double after = oracle::brute_sbda(docs[0].gold_spans, cand, 0.5);
    CHECK((r.after.sbda.at(0.5) >= r.before.sbda.at(0.5)) == (after >= base));
  }
}

TEST_CASE("the journal appends and replays") {
  TempDir dir("journal");
  CorrectionJournal j(dir.path / "c.jsonl");
  CHECK(j.read_all().empty());
  const Correction c = parse_correction(good_correction(), nullptr);
  j.append(c);
  j.append(c);
  CHECK(j.read_all() == std::vector<Correction>{c, c});
}

TEST_CASE("the artifact cache is keyed by document and checkpoint") {
  TempDir dir("cache");
  const ArtifactCache a(dir.path, "aaaa"), b(dir.path, "bbbb");
  CHECK(a.key("x") != a.key("y"));
  CHECK(a.key("x") != b.key("x"));
  CHECK_FALSE(a.get("x").has_value());
  a.put("x", {{"v", 1}});
  CHECK(a.get("x") == json{{"v", 1}});
  CHECK_FALSE(b.get("x").has_value());
}

TEST_CASE("service endpoints") {
  TempDir dir("service");
  HiaService svc(sample_docs(), segmenter(false), "hash0", dir.path);

  const Response all = svc.list_docs("", 0, 0);
  CHECK(all.status == 200);
  CHECK(all.body["total"] == 3);
  CHECK(all.body["limit"] == kDefaultPageSize);
  const Response page = svc.list_docs("", 1, 1);
  CHECK(page.body["items"].size() == 1);
  CHECK(page.body["items"][0]["id"] == "b");
  CHECK(svc.list_docs("test", 0, 10).body["total"] == 1);
  CHECK(svc.list_docs("bogus", 0, 10).status == 400);

  const Response doc = svc.get_doc("a");
  CHECK(doc.status == 200);
  CHECK(doc.body["checkpoint"] == "hash0");
  CHECK(doc.body["prediction"]["labels"].size() == sample_docs()[0].size());
  CHECK(svc.get_doc("zzz").status == 404);
  CHECK(svc.get_hia("a").body["doc_id"] == "a");
  CHECK(svc.get_hia("a").body == svc.get_hia("a").body);

  CHECK(svc.post_correction("{not json").status == 400);
  CHECK(svc.post_correction(good_correction("zzz").dump()).body["field"] == "doc_id");
  json bad = good_correction();
  bad["corrected_spans"] = json::array({json::array({0, 50})});
  const Response rejected = svc.post_correction(bad.dump());
  CHECK(rejected.status == 400);
  CHECK(rejected.body["field"] == "corrected_spans[0]");
  CHECK(svc.journal().read_all().empty());

  json fix = good_correction();
  fix["corrected_spans"] = json::array({json::array({3, 8})});
  CHECK(svc.post_correction(fix.dump()).status == 201);
  const Response rep = svc.report();
  CHECK(rep.body["corrections"] == 1);
  CHECK(rep.body["after"]["sbda"]["0.9"].get<double>() >= 0.0);

  // Artifacts persist across service instances with the same checkpoint.
  HiaService again(sample_docs(), segmenter(false), "hash0", dir.path);
  CHECK(again.get_hia("a").body == svc.get_hia("a").body);
  CHECK(again.report().body["corrections"] == 1);
  CHECK_THROWS(HiaService({sample_docs()[0], sample_docs()[0]}, segmenter(false), "h", dir.path));
}

}  // namespace
}  // namespace segmark::hia
