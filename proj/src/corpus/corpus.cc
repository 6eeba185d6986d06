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

#include "segmark/corpus/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "segmark/text/rng.h"
#include "segmark/text/utf8.h"

namespace segmark::corpus {

using nlohmann::json;

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

std::vector<Token> tokenize(std::string_view raw_text) {
  std::vector<Token> tokens;
  std::size_t start = 0;
  bool in_token = false;
  for (const text::CodePoint& cp : text::decode_utf8(raw_text)) {
    const bool ws = text::is_whitespace(cp.value);
    if (!ws && !in_token) {
      start = cp.byte_start;
      in_token = true;
    } else if (ws && in_token) {
      tokens.push_back({std::string(raw_text.substr(start, cp.byte_start - start)),
                        start, cp.byte_start});
      in_token = false;
    }
  }
  if (in_token) {
    tokens.push_back({std::string(raw_text.substr(start)), start,
                      raw_text.size()});
  }
  return tokens;
}

std::vector<Span> spans_from_labels(const std::vector<int>& labels) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] != 1) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < labels.size() && labels[j] == 1) ++j;
    spans.push_back({i, j});
    i = j;
  }
  return spans;
}

std::vector<int> labels_from_spans(const std::vector<Span>& spans,
                                   std::size_t token_count) {
  std::vector<int> labels(token_count, 0);
  for (const Span& s : spans) {
    if (s.start >= s.end || s.end > token_count) {
      throw InvariantError("span [" + std::to_string(s.start) + "," +
                           std::to_string(s.end) + ") out of range for " +
                           std::to_string(token_count) + " tokens");
    }
    for (std::size_t i = s.start; i < s.end; ++i) labels[i] = 1;
  }
  return labels;
}

Document make_document(std::string id, std::string raw_text,
                       std::vector<int> labels, DocumentMeta meta) {
  Document doc;
  doc.id = std::move(id);
  doc.raw_text = std::move(raw_text);
  doc.tokens = tokenize(doc.raw_text);
  if (labels.size() != doc.tokens.size()) {
    throw InvariantError("document '" + doc.id + "': " +
                         std::to_string(labels.size()) + " labels for " +
                         std::to_string(doc.tokens.size()) + " tokens");
  }
  doc.labels = std::move(labels);
  doc.gold_spans = spans_from_labels(doc.labels);
  doc.meta = std::move(meta);
  return doc;
}

Document parse_tagged(std::string_view input, std::string id) {
  struct TagMark {
    std::size_t out_pos;
    std::size_t in_pos;
  };
  std::string out;
  out.reserve(input.size());
  std::vector<TagMark> marks;
  std::vector<std::pair<std::size_t, std::size_t>> regions;
  std::optional<TagMark> open;

  std::size_t i = 0;
  while (i < input.size()) {
    const std::string_view rest = input.substr(i);
    if (rest.starts_with(kOpenTag)) {
      if (open) throw ParseError("nested <AI_Start>", i);
      open = TagMark{out.size(), i};
      marks.push_back(*open);
      i += kOpenTag.size();
    } else if (rest.starts_with(kCloseTag)) {
      if (!open) throw ParseError("</AI_End> without matching <AI_Start>", i);
      regions.emplace_back(open->out_pos, out.size());
      marks.push_back({out.size(), i});
      open.reset();
      i += kCloseTag.size();
    } else {
      out.push_back(input[i]);
      ++i;
    }
  }
  if (open) throw ParseError("unclosed <AI_Start>", open->in_pos);

  // A tag with non-whitespace on both sides would split a word.
  const std::vector<text::CodePoint> cps = text::decode_utf8(out);
  for (const TagMark& m : marks) {
    if (m.out_pos == 0 || m.out_pos >= out.size()) continue;
    auto after = std::lower_bound(
        cps.begin(), cps.end(), m.out_pos,
        [](const text::CodePoint& c, std::size_t p) { return c.byte_start < p; });
    if (after == cps.begin() || after == cps.end()) continue;
    const auto before = std::prev(after);
    if (!text::is_whitespace(before->value) &&
        !text::is_whitespace(after->value)) {
      throw ParseError("tag inside a word", m.in_pos);
    }
  }

  Document doc;
  doc.id = std::move(id);
  doc.raw_text = std::move(out);
  doc.tokens = tokenize(doc.raw_text);
  doc.labels.assign(doc.tokens.size(), 0);
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    for (const auto& [lo, hi] : regions) {
      if (doc.tokens[t].char_start >= lo && doc.tokens[t].char_end <= hi) {
        doc.labels[t] = 1;
        break;
      }
    }
  }
  doc.gold_spans = spans_from_labels(doc.labels);
  return doc;
}

std::string to_tagged(const Document& doc) {
  std::string out;
  std::size_t cursor = 0;
  for (const Span& s : doc.gold_spans) {
    const std::size_t open = doc.tokens[s.start].char_start;
    const std::size_t close = doc.tokens[s.end - 1].char_end;
    out.append(doc.raw_text, cursor, open - cursor);
    out.append(kOpenTag);
    out.append(doc.raw_text, open, close - open);
    out.append(kCloseTag);
    cursor = close;
  }
  out.append(doc.raw_text, cursor, std::string::npos);
  return out;
}

void validate(const Document& doc) {
  const std::string where = "document '" + doc.id + "': ";
  if (doc.labels.size() != doc.tokens.size()) {
    throw InvariantError(where + "label count differs from token count");
  }
  std::size_t prev_end = 0;
  for (const Token& t : doc.tokens) {
    if (t.char_start < prev_end || t.char_end <= t.char_start ||
        t.char_end > doc.raw_text.size() ||
        doc.raw_text.compare(t.char_start, t.char_end - t.char_start, t.text) !=
            0) {
      throw InvariantError(where + "token '" + t.text + "' has bad offsets");
    }
    prev_end = t.char_end;
  }
  for (int l : doc.labels) {
    if (l != 0 && l != 1) throw InvariantError(where + "label outside {0,1}");
  }
  if (doc.gold_spans != spans_from_labels(doc.labels)) {
    throw InvariantError(where + "gold spans are not the maximal runs of 1");
  }
}

Document with_token_texts(const Document& doc,
                          const std::vector<std::string>& new_texts) {
  if (new_texts.size() != doc.tokens.size()) {
    throw InvariantError("with_token_texts: token count mismatch");
  }
  Document out = doc;
  out.raw_text.clear();
  std::size_t cursor = 0;
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const Token& old = doc.tokens[t];
    out.raw_text.append(doc.raw_text, cursor, old.char_start - cursor);
    const std::size_t start = out.raw_text.size();
    out.raw_text.append(new_texts[t]);
    out.tokens[t] = Token{new_texts[t], start, out.raw_text.size()};
    cursor = old.char_end;
  }
  out.raw_text.append(doc.raw_text, cursor, std::string::npos);
  return out;
}

json to_json(const Document& doc) {
  json spans = json::array();
  for (const Span& s : doc.gold_spans) spans.push_back({s.start, s.end});
  json meta = {{"domain", doc.meta.domain},
               {"generator", doc.meta.generator},
               {"attack", nullptr},
               {"split", std::string(split_name(doc.meta.split))}};
  if (doc.meta.attack) meta["attack"] = *doc.meta.attack;
  return json{{"id", doc.id},
              {"text", doc.raw_text},
              {"labels", doc.labels},
              {"spans", spans},
              {"meta", meta}};
}

Document from_json(const json& j) {
  DocumentMeta meta;
  if (j.contains("meta")) {
    const json& m = j.at("meta");
    meta.domain = m.value("domain", "");
    meta.generator = m.value("generator", "");
    if (m.contains("attack") && !m.at("attack").is_null()) {
      meta.attack = m.at("attack").get<std::string>();
    }
    meta.split = parse_split(m.value("split", "train"));
  }
  Document doc = make_document(j.at("id").get<std::string>(),
                               j.at("text").get<std::string>(),
                               j.at("labels").get<std::vector<int>>(),
                               std::move(meta));
  if (j.contains("spans")) {
    std::vector<Span> spans;
    for (const json& s : j.at("spans")) {
      spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    }
    if (spans != doc.gold_spans) {
      throw InvariantError("document '" + doc.id +
                           "': spans disagree with labels");
    }
  }
  validate(doc);
  return doc;
}

std::vector<Document> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return docs;
}

void write_jsonl(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const Document& d : docs) out << to_json(d).dump() << '\n';
}

std::vector<Document> read_tagged_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find('.'));
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      docs.push_back(parse_tagged(line, stem + "-" + std::to_string(lineno)));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what(),
                       e.position());
    }
  }
  return docs;
}

std::vector<std::uint64_t> ngram_set(const Document& doc, int n) {
  std::vector<std::string> words;
  words.reserve(doc.tokens.size());
  for (const Token& t : doc.tokens) words.push_back(text::ascii_lower(t.text));
  std::vector<std::uint64_t> grams;
  const auto hash_range = [&](std::size_t lo, std::size_t hi) {
    std::uint64_t h = text::fnv1a64("");
    for (std::size_t k = lo; k < hi; ++k) {
      h = text::fnv1a64(words[k], h);
      h = text::fnv1a64(std::string_view("\x1f", 1), h);
    }
    return h;
  };
  const std::size_t order = static_cast<std::size_t>(std::max(n, 1));
  if (words.empty()) return grams;
  if (words.size() < order) {
    grams.push_back(hash_range(0, words.size()));
  } else {
    for (std::size_t i = 0; i + order <= words.size(); ++i) {
      grams.push_back(hash_range(i, i + order));
    }
  }
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

double jaccard(const std::vector<std::uint64_t>& a,
               const std::vector<std::uint64_t>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size() - inter);
}

namespace {

std::string meta_value(const Document& d, const std::string& key) {
  if (key == "domain" || key == "meta.domain") return d.meta.domain;
  if (key == "generator" || key == "meta.generator") return d.meta.generator;
  if (key == "attack" || key == "meta.attack") return d.meta.attack.value_or("");
  throw std::invalid_argument("cannot stratify on '" + key + "'");
}

// Index of earlier-split documents, keyed by n-gram hash.
class GramIndex {
 public:
  void add(std::size_t doc, const std::vector<std::uint64_t>& grams) {
    for (std::uint64_t g : grams) postings_[g].push_back(doc);
  }

  // Highest-Jaccard indexed document, ties toward the lowest index.
  std::optional<std::pair<std::size_t, double>> best_match(
      const std::vector<std::uint64_t>& grams,
      const std::vector<std::vector<std::uint64_t>>& all) const {
    std::map<std::size_t, std::size_t> shared;
    for (std::uint64_t g : grams) {
      auto it = postings_.find(g);
      if (it == postings_.end()) continue;
      for (std::size_t d : it->second) ++shared[d];
    }
    std::optional<std::pair<std::size_t, double>> best;
    for (const auto& [d, inter] : shared) {
      const double j = static_cast<double>(inter) /
                       static_cast<double>(grams.size() + all[d].size() - inter);
      if (!best || j > best->second) best = {d, j};
    }
    return best;
  }

 private:
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> postings_;
};

}  // namespace

SplitResult split_corpus(std::vector<Document> docs, const SplitOptions& opts) {
  if (docs.empty()) throw std::invalid_argument("split_corpus: empty corpus");
  const SplitRatios& r = opts.ratios;
  if (r.train < 0 || r.valid < 0 || r.test < 0 ||
      std::abs(r.train + r.valid + r.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split_corpus: ratios must sum to 1");
  }
  if (!(opts.overlap_threshold > 0.0 && opts.overlap_threshold <= 1.0)) {
    throw std::invalid_argument("split_corpus: overlap threshold not in (0,1]");
  }

  // Group (one group when unstratified), shuffle each group, cut by ratio.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    groups[opts.stratify_key.empty() ? std::string()
                                     : meta_value(docs[i], opts.stratify_key)]
        .push_back(i);
  }
  text::Rng rng(opts.seed);
  std::vector<Split> assignment(docs.size(), Split::kTrain);
  std::vector<std::size_t> order;
  for (auto& [key, members] : groups) {
    rng.shuffle(members);
    const std::size_t n = members.size();
    const auto n_train = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::llround(r.train * n)));
    const auto n_valid = std::min<std::size_t>(
        n - n_train, static_cast<std::size_t>(std::llround(r.valid * n)));
    for (std::size_t k = 0; k < n; ++k) {
      assignment[members[k]] = k < n_train             ? Split::kTrain
                               : k < n_train + n_valid ? Split::kValid
                                                       : Split::kTest;
    }
    order.insert(order.end(), members.begin(), members.end());
  }

  std::vector<std::vector<std::uint64_t>> grams(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    grams[i] = ngram_set(docs[i], opts.ngram_n);
  }

  SplitResult result;
  GramIndex earlier;
  std::vector<bool> keep(docs.size(), true);
  for (Split phase : {Split::kTrain, Split::kValid, Split::kTest}) {
    std::vector<std::size_t> kept_now;
    for (std::size_t i : order) {
      if (assignment[i] != phase) continue;
      if (phase != Split::kTrain) {
        if (auto m = earlier.best_match(grams[i], grams);
            m && m->second > opts.overlap_threshold) {
          keep[i] = false;
          result.dropped.push_back({docs[i].id, phase, docs[m->first].id,
                                    assignment[m->first], m->second});
          continue;
        }
      }
      kept_now.push_back(i);
    }
    for (std::size_t i : kept_now) earlier.add(i, grams[i]);
  }

  for (std::size_t i : order) {
    if (!keep[i]) continue;
    Document d = std::move(docs[i]);
    d.meta.split = assignment[i];
    switch (assignment[i]) {
      case Split::kTrain:
        result.train.push_back(std::move(d));
        break;
      case Split::kValid:
        result.valid.push_back(std::move(d));
        break;
      case Split::kTest:
        result.test.push_back(std::move(d));
        break;
    }
  }
  return result;
}

}  // namespace segmark::corpus
