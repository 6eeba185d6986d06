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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace segmark::corpus {

// A whitespace-delimited word. Offsets are UTF-8 byte offsets into the
// document's raw text, end exclusive.
struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const Token&) const = default;
};

// Half-open token interval [start, end) covering a run of AI-labeled tokens.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

enum class Split { kTrain, kValid, kTest };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

struct DocumentMeta {
  std::string domain;
  std::string generator;
  std::optional<std::string> attack;
  Split split = Split::kTrain;

  bool operator==(const DocumentMeta&) const = default;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<Token> tokens;
  std::vector<int> labels;  // 0 = human, 1 = AI
  std::vector<Span> gold_spans;
  DocumentMeta meta;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Document&) const = default;
};

// Raised for malformed tagged text. `position` is a byte offset into the
// tagged input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Raised when a document violates its invariants (label/token mismatch,
// spans inconsistent with labels, bad offsets).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kOpenTag = "<AI_Start>";
inline constexpr std::string_view kCloseTag = "</AI_End>";

std::vector<Token> tokenize(std::string_view raw_text);

std::vector<Span> spans_from_labels(const std::vector<int>& labels);

std::vector<int> labels_from_spans(const std::vector<Span>& spans,
                                   std::size_t token_count);

// Builds a document from plain text and per-token labels; gold spans are
// derived from the labels.
Document make_document(std::string id, std::string raw_text,
                       std::vector<int> labels, DocumentMeta meta = {});

// Parses text carrying <AI_Start> ... </AI_End> markers. Tags must sit on
// token boundaries and may not nest.
Document parse_tagged(std::string_view text_with_tags, std::string id = {});

// Inverse of parse_tagged: re-inserts tags around each gold span.
std::string to_tagged(const Document& doc);

// Throws InvariantError when any Document invariant fails.
void validate(const Document& doc);

// Rebuilds raw_text and offsets after tokens have been edited in place,
// keeping the original inter-token whitespace.
Document with_token_texts(const Document& doc,
                          const std::vector<std::string>& new_texts);

// JSONL record form.
nlohmann::json to_json(const Document& doc);
Document from_json(const nlohmann::json& j);

std::vector<Document> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<Document>& docs);

// Plain text blocks separated by blank lines, one tagged document per block.
std::vector<Document> read_tagged_file(const std::string& path);

struct SplitRatios {
  double train = 0.7;
  double valid = 0.2;
  double test = 0.1;
};

struct SplitOptions {
  SplitRatios ratios;
  int ngram_n = 3;
  double overlap_threshold = 0.3;
  std::uint64_t seed = 0;
  // Metadata key to stratify on ("domain", "generator", "attack"); empty
  // means unstratified.
  std::string stratify_key;
};

struct DroppedDocument {
  std::string id;
  Split split;
  std::string conflicting_id;
  Split conflicting_split;
  double jaccard = 0.0;
};

struct SplitResult {
  std::vector<Document> train;
  std::vector<Document> valid;
  std::vector<Document> test;
  std::vector<DroppedDocument> dropped;
};

// Sorted, de-duplicated hashes of case-folded word n-grams. Documents with
// fewer than n tokens contribute their whole token sequence as one gram.
std::vector<std::uint64_t> ngram_set(const Document& doc, int n);

double jaccard(const std::vector<std::uint64_t>& a,
               const std::vector<std::uint64_t>& b);

// Seeded 70/20/10 split with cross-split n-gram hygiene. Documents in a later
// split (valid, then test) whose Jaccard with any kept document of an earlier
// split exceeds the threshold are dropped and reported.
SplitResult split_corpus(std::vector<Document> docs, const SplitOptions& opts);

}  // namespace segmark::corpus
