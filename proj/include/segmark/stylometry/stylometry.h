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

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "segmark/corpus/corpus.h"

namespace segmark::stylometry {

// Add-k smoothed word n-gram model. Words are ASCII case-folded. Vocabulary
// ids: 0 is UNK, 1..V-1 are training words; a separate BOS id pads contexts
// and is never predicted, so distributions range over exactly V outcomes.
class NgramLM {
 public:
  static constexpr std::uint32_t kUnk = 0;
  static constexpr std::uint32_t kBos = 0xFFFFFFFFu;
  static constexpr int kFormatVersion = 1;

  NgramLM() = default;

  // Counts come from label-0 tokens only: each maximal run of human tokens is
  // one padded sequence. Throws on an empty corpus or order < 1.
  static NgramLM train(const std::vector<corpus::Document>& docs, int order,
                       double smoothing_k);

  int order() const { return order_; }
  double smoothing_k() const { return k_; }
  std::size_t vocab_size() const { return vocab_.size(); }

  std::uint32_t word_id(std::string_view word) const;

  // p(word | context). `context` holds the preceding ids, most recent last;
  // only the last order-1 are used and missing positions are BOS.
  double prob(const std::vector<std::uint32_t>& context,
              std::uint32_t word) const;

  // Natural-log entropy of the next-word distribution over all V outcomes.
  double entropy(const std::vector<std::uint32_t>& context) const;

  // Ids for a token sequence.
  std::vector<std::uint32_t> encode(const std::vector<corpus::Token>& tokens) const;

  nlohmann::json to_json() const;
  static NgramLM from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static NgramLM load(const std::string& path);

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<std::uint32_t, std::uint64_t> next;
  };

  std::string context_key(const std::vector<std::uint32_t>& context) const;
  const ContextStats* find_context(
      const std::vector<std::uint32_t>& context) const;

  int order_ = 3;
  double k_ = 0.1;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::unordered_map<std::string, ContextStats> contexts_;
};

inline constexpr std::size_t kStyleDim = 5;

enum StyleChannel : std::size_t {
  kPerplexity = 0,
  kPosDensity = 1,
  kPunctDensity = 2,
  kLexicalDiversity = 3,
  kReadability = 4,
};

// Row-major T x 5 feature matrix.
struct StyleMatrix {
  std::size_t rows = 0;
  std::vector<double> values;

  double at(std::size_t t, std::size_t f) const {
    return values[t * kStyleDim + f];
  }
  double& at(std::size_t t, std::size_t f) { return values[t * kStyleDim + f]; }
  bool operator==(const StyleMatrix&) const = default;
};

// Per-token -log2 p(token | previous order-1 tokens).
std::vector<double> token_surprisal(const NgramLM& lm,
                                    const corpus::Document& doc);

// Coarse universal-style tags.
enum class PosTag {
  kNoun, kVerb, kAdj, kAdv, kPron, kDet, kAdp, kNum, kConj, kPrt, kPunct, kX
};
inline constexpr std::size_t kPosTagCount = 12;

PosTag tag_word(std::string_view token);

// Case-folded token with surrounding punctuation removed; pure punctuation
// keeps its lowercased form. Used as the word type for lexical diversity.
std::string normalized_word(std::string_view token);
bool is_function_tag(PosTag tag);

enum class PosSummary { kFunctionRatio, kTagEntropy };

// Centered windows span [t - window, t + window] clipped to the document.
std::vector<double> pos_density(const corpus::Document& doc, int window,
                                PosSummary summary = PosSummary::kFunctionRatio);
std::vector<double> punct_density(const corpus::Document& doc, int window);
std::vector<double> lexical_diversity(const corpus::Document& doc, int window);

// Token index ranges of sentences; a sentence ends at a token whose final
// character is '.', '!' or '?'.
std::vector<std::pair<std::size_t, std::size_t>> sentence_ranges(
    const corpus::Document& doc);

// Vowel-group syllable count with silent-final-e handling; at least 1 for any
// token containing a letter, 0 otherwise.
int count_syllables(std::string_view word);

// Flesch reading ease of the enclosing sentence, clamped to [0, 100] and
// scaled to [0, 1].
std::vector<double> readability(const corpus::Document& doc);

struct StyleConfig {
  int window = 5;
  PosSummary pos_summary = PosSummary::kFunctionRatio;
};

// Everything needed to featurize a document: the LM and the squashing scale
// for surprisal.
struct StyleExtractor {
  NgramLM lm;
  double surprisal_scale = 1.0;  // median corpus surprisal
  StyleConfig config;

  static StyleExtractor fit(const std::vector<corpus::Document>& train_docs,
                            int order = 3, double smoothing_k = 0.1,
                            StyleConfig config = {});

  nlohmann::json to_json() const;
  static StyleExtractor from_json(const nlohmann::json& j);
};

double median_surprisal(const NgramLM& lm,
                        const std::vector<corpus::Document>& docs);

StyleMatrix build_style_matrix(const corpus::Document& doc, const NgramLM& lm,
                               int window, double surprisal_scale,
                               PosSummary summary = PosSummary::kFunctionRatio);

StyleMatrix build_style_matrix(const corpus::Document& doc,
                               const StyleExtractor& extractor);

nlohmann::json style_matrix_json(const StyleMatrix& s);

}  // namespace segmark::stylometry
