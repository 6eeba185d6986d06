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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "segmark/corpus/corpus.h"
#include "segmark/evalkit/metrics.h"
#include "segmark/model/segmenter.h"

namespace segmark::hia {

using corpus::Span;

inline constexpr int kHiaSchemaVersion = 1;
inline constexpr int kCorrectionSchemaVersion = 1;

struct HiaRecord {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<double> mask;
  std::vector<double> attention_x_mask;
  std::vector<std::array<double, 5>> style_heatmap;
  std::vector<Span> pred_spans;
  std::vector<double> pred_marginals;
  std::optional<std::vector<Span>> gold_spans;

  nlohmann::json to_json() const;
  static HiaRecord from_json(const nlohmann::json& j);
  bool operator==(const HiaRecord&) const = default;
};

HiaRecord export_hia(const corpus::Document& doc, const model::Segmenter& model,
                     bool include_gold = true);

struct Correction {
  std::string doc_id;
  std::string reviewer_id;
  std::vector<Span> corrected_spans;
  int rating_boundary = 0;
  int rating_hia = 0;
  std::int64_t elapsed_ms = 0;

  nlohmann::json to_json() const;
  bool operator==(const Correction&) const = default;
};

// A rejected correction. `field` is a path into the submitted object, for
// example "corrected_spans[1]" or "rating_hia".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Checks types, ranges and, when `doc` is given, that the spans are sorted,
// disjoint, non-empty and inside the document.
Correction parse_correction(const nlohmann::json& j, const corpus::Document* doc);

// Append-only JSONL log of accepted corrections. Appends are serialized.
class CorrectionJournal {
 public:
  explicit CorrectionJournal(std::filesystem::path path) : path_(std::move(path)) {}
  void append(const Correction& c);
  std::vector<Correction> read_all() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

// Predicted spans per document id.
using SpanStore = std::map<std::string, std::vector<Span>>;

// Replays corrections in order; the last correction for a document wins.
SpanStore apply_corrections(const SpanStore& predictions,
                            const std::vector<Correction>& corrections);

struct CorrectionReport {
  evalkit::EvalReport before;
  evalkit::EvalReport after;
  std::size_t corrections = 0;
  std::size_t documents_changed = 0;

  nlohmann::json to_json() const;
};

CorrectionReport correction_report(const std::vector<corpus::Document>& docs,
                                   const SpanStore& predictions,
                                   const std::vector<Correction>& corrections);

// Predictions and HIA records cached on disk under a key derived from the
// document id and the checkpoint hash.
class ArtifactCache {
 public:
  ArtifactCache(std::filesystem::path dir, std::string checkpoint_hash);
  std::string key(const std::string& doc_id) const;
  std::optional<nlohmann::json> get(const std::string& doc_id) const;
  void put(const std::string& doc_id, const nlohmann::json& value) const;

 private:
  std::filesystem::path dir_;
  std::string checkpoint_hash_;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

// The request handlers behind the HTTP API, usable without a socket.
class HiaService {
 public:
  HiaService(std::vector<corpus::Document> docs, model::Segmenter model,
             std::string checkpoint_hash, std::filesystem::path state_dir);

  Response list_docs(const std::string& split, std::size_t offset, std::size_t limit) const;
  Response get_doc(const std::string& id) const;
  Response get_hia(const std::string& id) const;
  Response post_correction(const std::string& body);
  Response report() const;

  const CorrectionJournal& journal() const { return journal_; }

 private:
  const corpus::Document* find(const std::string& id) const;
  // Cached {"prediction", "hia"} artifacts for one document.
  nlohmann::json artifacts(const corpus::Document& doc) const;

  std::vector<corpus::Document> docs_;
  std::map<std::string, std::size_t> index_;
  model::Segmenter model_;
  std::string checkpoint_hash_;
  ArtifactCache cache_;
  CorrectionJournal journal_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::string, nlohmann::json> memo_;
};

inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 500;

}  // namespace segmark::hia
