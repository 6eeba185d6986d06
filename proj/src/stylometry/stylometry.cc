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

#include "segmark/stylometry/stylometry.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "segmark/text/utf8.h"

namespace segmark::stylometry {

using corpus::Document;
using nlohmann::json;

namespace {

void append_id(std::string& key, std::uint32_t id) {
  for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((id >> (8 * b)) & 0xFF));
}

std::vector<std::uint32_t> key_ids(const std::string& key) {
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i + 4 <= key.size(); i += 4) {
    std::uint32_t id = 0;
    for (int b = 0; b < 4; ++b) {
      id |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[i + b]))
            << (8 * b);
    }
    ids.push_back(id);
  }
  return ids;
}

}  // namespace

std::string NgramLM::context_key(
    const std::vector<std::uint32_t>& context) const {
  const std::size_t width = static_cast<std::size_t>(order_ - 1);
  std::string key;
  key.reserve(4 * width);
  for (std::size_t i = 0; i < width; ++i) {
    // Position i of the window corresponds to context[size - width + i].
    const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(context.size()) -
                               static_cast<std::ptrdiff_t>(width) +
                               static_cast<std::ptrdiff_t>(i);
    append_id(key, src < 0 ? kBos : context[static_cast<std::size_t>(src)]);
  }
  return key;
}

const NgramLM::ContextStats* NgramLM::find_context(
    const std::vector<std::uint32_t>& context) const {
  auto it = contexts_.find(context_key(context));
  return it == contexts_.end() ? nullptr : &it->second;
}

NgramLM NgramLM::train(const std::vector<Document>& docs, int order,
                       double smoothing_k) {
  if (order < 1) throw std::invalid_argument("NgramLM: order must be >= 1");
  if (smoothing_k < 0) throw std::invalid_argument("NgramLM: negative k");
  NgramLM lm;
  lm.order_ = order;
  lm.k_ = smoothing_k;
  lm.vocab_.push_back("<unk>");
  lm.index_.emplace("<unk>", kUnk);

  std::size_t counted = 0;
  for (const Document& doc : docs) {
    std::vector<std::uint32_t> run;
    const auto flush = [&] {
      for (std::size_t i = 0; i < run.size(); ++i) {
        const std::vector<std::uint32_t> ctx(run.begin(),
                                             run.begin() + static_cast<std::ptrdiff_t>(i));
        ContextStats& stats = lm.contexts_[lm.context_key(ctx)];
        ++stats.total;
        ++stats.next[run[i]];
        ++counted;
      }
      run.clear();
    };
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      if (doc.labels[t] != 0) {
        flush();
        continue;
      }
      const std::string w = text::ascii_lower(doc.tokens[t].text);
      auto [it, inserted] =
          lm.index_.emplace(w, static_cast<std::uint32_t>(lm.vocab_.size()));
      if (inserted) lm.vocab_.push_back(w);
      run.push_back(it->second);
    }
    flush();
  }
  if (counted == 0) throw std::invalid_argument("NgramLM: empty corpus");
  return lm;
}

std::uint32_t NgramLM::word_id(std::string_view word) const {
  auto it = index_.find(text::ascii_lower(word));
  return it == index_.end() ? kUnk : it->second;
}

double NgramLM::prob(const std::vector<std::uint32_t>& context,
                     std::uint32_t word) const {
  const double v = static_cast<double>(vocab_.size());
  const ContextStats* stats = find_context(context);
  const double total = stats ? static_cast<double>(stats->total) : 0.0;
  if (total == 0.0 && k_ == 0.0) return 1.0 / v;
  double count = 0.0;
  if (stats) {
    auto it = stats->next.find(word);
    if (it != stats->next.end()) count = static_cast<double>(it->second);
  }
  return (count + k_) / (total + k_ * v);
}

double NgramLM::entropy(const std::vector<std::uint32_t>& context) const {
  const double v = static_cast<double>(vocab_.size());
  const ContextStats* stats = find_context(context);
  if (!stats || stats->total == 0) return std::log(v);
  const double denom = static_cast<double>(stats->total) + k_ * v;
  double h = 0.0;
  for (const auto& [id, c] : stats->next) {
    const double p = (static_cast<double>(c) + k_) / denom;
    h -= p * std::log(p);
  }
  const double unseen = v - static_cast<double>(stats->next.size());
  const double p0 = k_ / denom;
  if (p0 > 0.0 && unseen > 0.0) h -= unseen * p0 * std::log(p0);
  return h;
}

std::vector<std::uint32_t> NgramLM::encode(
    const std::vector<corpus::Token>& tokens) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const corpus::Token& t : tokens) ids.push_back(word_id(t.text));
  return ids;
}

json NgramLM::to_json() const {
  json contexts = json::array();
  std::map<std::string, const ContextStats*> sorted;
  for (const auto& [key, stats] : contexts_) sorted.emplace(key, &stats);
  for (const auto& [key, stats] : sorted) {
    std::map<std::uint32_t, std::uint64_t> next(stats->next.begin(),
                                                stats->next.end());
    json entries = json::array();
    for (const auto& [id, c] : next) entries.push_back({id, c});
    contexts.push_back({{"ctx", key_ids(key)}, {"next", entries}});
  }
  return json{{"format", "segmark-ngram"},
              {"version", kFormatVersion},
              {"order", order_},
              {"k", k_},
              {"vocab", vocab_},
              {"contexts", contexts}};
}

NgramLM NgramLM::from_json(const json& j) {
  if (j.value("format", "") != "segmark-ngram" ||
      j.value("version", 0) != kFormatVersion) {
    throw std::runtime_error("NgramLM: unsupported format/version");
  }
  NgramLM lm;
  lm.order_ = j.at("order").get<int>();
  lm.k_ = j.at("k").get<double>();
  lm.vocab_ = j.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < lm.vocab_.size(); ++i) {
    lm.index_.emplace(lm.vocab_[i], static_cast<std::uint32_t>(i));
  }
  for (const json& c : j.at("contexts")) {
    std::string key;
    for (std::uint32_t id : c.at("ctx").get<std::vector<std::uint32_t>>()) {
      append_id(key, id);
    }
    ContextStats& stats = lm.contexts_[key];
    for (const json& e : c.at("next")) {
      const auto id = e.at(0).get<std::uint32_t>();
      const auto count = e.at(1).get<std::uint64_t>();
      stats.next[id] = count;
      stats.total += count;
    }
  }
  return lm;
}

void NgramLM::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json().dump();
}

NgramLM NgramLM::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return from_json(json::parse(in));
}

std::vector<double> token_surprisal(const NgramLM& lm, const Document& doc) {
  const std::vector<std::uint32_t> ids = lm.encode(doc.tokens);
  std::vector<double> out(ids.size());
  std::vector<std::uint32_t> ctx;
  const std::size_t width = static_cast<std::size_t>(lm.order() - 1);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    ctx.assign(ids.begin() + static_cast<std::ptrdiff_t>(t - std::min(t, width)),
               ids.begin() + static_cast<std::ptrdiff_t>(t));
    out[t] = -std::log2(lm.prob(ctx, ids[t]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Part-of-speech heuristics.

namespace {

const std::unordered_map<std::string, PosTag>& lexicon() {
  static const std::unordered_map<std::string, PosTag> table = [] {
    std::unordered_map<std::string, PosTag> m;
    const auto add = [&m](PosTag tag, std::initializer_list<const char*> words) {
      for (const char* w : words) m.emplace(w, tag);
    };
    add(PosTag::kDet,
        {"the", "a", "an", "this", "that", "these", "those", "each", "every",
         "some", "any", "no", "all", "both", "either", "neither", "another",
         "such", "what", "which", "whose", "my", "your", "his", "her", "its",
         "our", "their", "much", "many", "few", "several"});
    add(PosTag::kPron,
        {"i", "me", "you", "he", "him", "she", "it", "we", "us", "they",
         "them", "myself", "yourself", "himself", "herself", "itself",
         "ourselves", "themselves", "who", "whom", "mine", "yours", "hers",
         "ours", "theirs", "someone", "anyone", "everyone", "nobody",
         "something", "anything", "everything", "nothing"});
    add(PosTag::kAdp,
        {"of", "in", "on", "at", "by", "for", "with", "about", "against",
         "between", "into", "through", "during", "before", "after", "above",
         "below", "to", "from", "over", "under", "than", "among", "across",
         "along", "around", "behind", "beside", "beyond", "near", "onto",
         "per", "since", "toward", "towards", "upon", "via", "within",
         "without"});
    add(PosTag::kConj,
        {"and", "or", "but", "nor", "so", "yet", "because", "although",
         "though", "while", "whereas", "if", "unless", "until", "whether"});
    add(PosTag::kPrt, {"not", "n't", "'s", "up", "off", "out"});
    add(PosTag::kVerb,
        {"is", "are", "was", "were", "be", "been", "being", "am", "have",
         "has", "had", "do", "does", "did", "will", "would", "shall",
         "should", "can", "could", "may", "might", "must"});
    add(PosTag::kAdv,
        {"very", "too", "also", "just", "then", "there", "here", "now",
         "never", "always", "often", "again", "still", "soon"});
    return m;
  }();
  return table;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.ends_with(suffix);
}

}  // namespace

std::string normalized_word(std::string_view token) {
  std::string w = text::strip_punctuation_lower(token);
  return w.empty() ? text::ascii_lower(token) : w;
}

PosTag tag_word(std::string_view token) {
  const std::string w = text::strip_punctuation_lower(token);
  if (w.empty()) {
    return text::contains_punctuation(token) ? PosTag::kPunct : PosTag::kX;
  }
  if (std::all_of(w.begin(), w.end(), [](char c) {
        return (c >= '0' && c <= '9') || c == '.' || c == ',';
      })) {
    return PosTag::kNum;
  }
  if (auto it = lexicon().find(w); it != lexicon().end()) return it->second;
  if (!text::contains_letter(w)) return PosTag::kX;
  if (ends_with(w, "ly")) return PosTag::kAdv;
  for (std::string_view s : {"ing", "ed", "ize", "ise"}) {
    if (ends_with(w, s) && w.size() > s.size() + 2) return PosTag::kVerb;
  }
  for (std::string_view s : {"ous", "ful", "ive", "able", "ible", "less", "ic", "al"}) {
    if (ends_with(w, s) && w.size() > s.size() + 2) return PosTag::kAdj;
  }
  return PosTag::kNoun;
}

bool is_function_tag(PosTag tag) {
  return tag == PosTag::kPron || tag == PosTag::kDet || tag == PosTag::kAdp ||
         tag == PosTag::kConj || tag == PosTag::kPrt;
}

namespace {

struct Window {
  std::size_t lo;
  std::size_t hi;  // exclusive
};

Window window_at(std::size_t t, std::size_t n, int window) {
  const std::size_t w = static_cast<std::size_t>(std::max(window, 0));
  return {t >= w ? t - w : 0, std::min(n, t + w + 1)};
}

void check_window(int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

std::vector<double> windowed_fraction(const std::vector<int>& hits,
                                      int window) {
  const std::size_t n = hits.size();
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + hits[i];
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Window w = window_at(t, n, window);
    out[t] = static_cast<double>(prefix[w.hi] - prefix[w.lo]) /
             static_cast<double>(w.hi - w.lo);
  }
  return out;
}

}  // namespace

std::vector<double> pos_density(const Document& doc, int window,
                                PosSummary summary) {
  check_window(window);
  const std::size_t n = doc.tokens.size();
  std::vector<PosTag> tags(n);
  for (std::size_t t = 0; t < n; ++t) tags[t] = tag_word(doc.tokens[t].text);
  if (summary == PosSummary::kFunctionRatio) {
    std::vector<int> hits(n);
    for (std::size_t t = 0; t < n; ++t) hits[t] = is_function_tag(tags[t]);
    return windowed_fraction(hits, window);
  }
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Window w = window_at(t, n, window);
    std::array<int, kPosTagCount> counts{};
    for (std::size_t i = w.lo; i < w.hi; ++i) {
      ++counts[static_cast<std::size_t>(tags[i])];
    }
    double h = 0.0;
    const double total = static_cast<double>(w.hi - w.lo);
    for (int c : counts) {
      if (c > 0) h -= (c / total) * std::log(c / total);
    }
    out[t] = h / std::log(static_cast<double>(kPosTagCount));
  }
  return out;
}

std::vector<double> punct_density(const Document& doc, int window) {
  check_window(window);
  std::vector<int> hits(doc.tokens.size());
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    hits[t] = text::contains_punctuation(doc.tokens[t].text);
  }
  return windowed_fraction(hits, window);
}

std::vector<double> lexical_diversity(const Document& doc, int window) {
  check_window(window);
  const std::size_t n = doc.tokens.size();
  std::vector<std::string> words(n);
  for (std::size_t t = 0; t < n; ++t) words[t] = normalized_word(doc.tokens[t].text);

  // Both window edges move monotonically, so one sliding multiset suffices.
  std::unordered_map<std::string_view, int> counts;
  std::size_t distinct = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Window w = window_at(t, n, window);
    while (hi < w.hi) {
      if (counts[words[hi]]++ == 0) ++distinct;
      ++hi;
    }
    while (lo < w.lo) {
      if (--counts[words[lo]] == 0) --distinct;
      ++lo;
    }
    out[t] = static_cast<double>(distinct) / static_cast<double>(w.hi - w.lo);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> sentence_ranges(
    const Document& doc) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    std::vector<char32_t> cps = text::to_code_points(doc.tokens[t].text);
    while (!cps.empty() && (cps.back() == U'"' || cps.back() == U'\'' ||
                            cps.back() == U')' || cps.back() == U']')) {
      cps.pop_back();
    }
    if (!cps.empty() &&
        (cps.back() == U'.' || cps.back() == U'!' || cps.back() == U'?')) {
      out.emplace_back(start, t + 1);
      start = t + 1;
    }
  }
  if (start < doc.tokens.size()) out.emplace_back(start, doc.tokens.size());
  return out;
}

int count_syllables(std::string_view word) {
  if (!text::contains_letter(word)) return 0;
  const std::string w = text::ascii_lower(word);
  const auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  std::string letters;
  for (char c : w) {
    if (c >= 'a' && c <= 'z') letters.push_back(c);
  }
  int groups = 0;
  bool prev = false;
  for (char c : letters) {
    const bool v = vowel(c);
    if (v && !prev) ++groups;
    prev = v;
  }
  // Silent final e ("make"), but not consonant + "le" ("table").
  const std::size_t n = letters.size();
  if (groups > 1 && n >= 2 && letters[n - 1] == 'e' && !vowel(letters[n - 2]) &&
      !(letters[n - 2] == 'l' && n >= 3 && !vowel(letters[n - 3]))) {
    --groups;
  }
  return std::max(groups, 1);
}

std::vector<double> readability(const Document& doc) {
  std::vector<double> out(doc.tokens.size(), 0.0);
  for (const auto& [lo, hi] : sentence_ranges(doc)) {
    const double words = static_cast<double>(hi - lo);
    double syllables = 0.0;
    for (std::size_t t = lo; t < hi; ++t) {
      syllables += count_syllables(doc.tokens[t].text);
    }
    const double fre = 206.835 - 1.015 * words - 84.6 * (syllables / words);
    const double score = std::clamp(fre, 0.0, 100.0) / 100.0;
    for (std::size_t t = lo; t < hi; ++t) out[t] = score;
  }
  return out;
}

double median_surprisal(const NgramLM& lm, const std::vector<Document>& docs) {
  std::vector<double> all;
  for (const Document& d : docs) {
    for (double s : token_surprisal(lm, d)) {
      if (std::isfinite(s)) all.push_back(s);
    }
  }
  if (all.empty()) return 1.0;
  std::sort(all.begin(), all.end());
  const std::size_t n = all.size();
  const double median = n % 2 ? all[n / 2] : 0.5 * (all[n / 2 - 1] + all[n / 2]);
  return median > 0.0 ? median : 1.0;
}

StyleExtractor StyleExtractor::fit(const std::vector<Document>& train_docs,
                                   int order, double smoothing_k,
                                   StyleConfig config) {
  StyleExtractor ex;
  ex.lm = NgramLM::train(train_docs, order, smoothing_k);
  ex.surprisal_scale = median_surprisal(ex.lm, train_docs);
  ex.config = config;
  return ex;
}

json StyleExtractor::to_json() const {
  return json{{"lm", lm.to_json()},
              {"surprisal_scale", surprisal_scale},
              {"window", config.window},
              {"pos_summary", config.pos_summary == PosSummary::kTagEntropy
                                  ? "tag_entropy"
                                  : "function_ratio"}};
}

StyleExtractor StyleExtractor::from_json(const json& j) {
  StyleExtractor ex;
  ex.lm = NgramLM::from_json(j.at("lm"));
  ex.surprisal_scale = j.at("surprisal_scale").get<double>();
  ex.config.window = j.at("window").get<int>();
  ex.config.pos_summary = j.value("pos_summary", "function_ratio") == "tag_entropy"
                              ? PosSummary::kTagEntropy
                              : PosSummary::kFunctionRatio;
  return ex;
}

StyleMatrix build_style_matrix(const Document& doc, const NgramLM& lm,
                               int window, double surprisal_scale,
                               PosSummary summary) {
  if (!(surprisal_scale > 0.0)) {
    throw std::invalid_argument("surprisal scale must be positive");
  }
  const std::size_t n = doc.tokens.size();
  const std::vector<double> surprisal = token_surprisal(lm, doc);
  const std::vector<double> pos = pos_density(doc, window, summary);
  const std::vector<double> punct = punct_density(doc, window);
  const std::vector<double> lex = lexical_diversity(doc, window);
  const std::vector<double> read = readability(doc);
  StyleMatrix s;
  s.rows = n;
  s.values.resize(n * kStyleDim);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = surprisal[t];
    s.at(t, kPerplexity) = std::isinf(x) ? 1.0 : x / (x + surprisal_scale);
    s.at(t, kPosDensity) = pos[t];
    s.at(t, kPunctDensity) = punct[t];
    s.at(t, kLexicalDiversity) = lex[t];
    s.at(t, kReadability) = read[t];
  }
  return s;
}

StyleMatrix build_style_matrix(const Document& doc,
                               const StyleExtractor& extractor) {
  return build_style_matrix(doc, extractor.lm, extractor.config.window,
                            extractor.surprisal_scale,
                            extractor.config.pos_summary);
}

json style_matrix_json(const StyleMatrix& s) {
  json rows = json::array();
  for (std::size_t t = 0; t < s.rows; ++t) {
    rows.push_back(std::vector<double>(s.values.begin() + static_cast<std::ptrdiff_t>(t * kStyleDim),
                                       s.values.begin() + static_cast<std::ptrdiff_t>((t + 1) * kStyleDim)));
  }
  return rows;
}

}  // namespace segmark::stylometry
