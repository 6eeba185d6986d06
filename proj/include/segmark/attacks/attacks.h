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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segmark/corpus/corpus.h"
#include "segmark/text/rng.h"

namespace segmark::attacks {

enum class AttackKind {
  kMisspelling,
  kCharSubstitution,
  kInvisibleChar,
  kPunctSubstitution,
  kCaseSwap,
  kAllMixed,
};

inline constexpr std::array<AttackKind, 5> kBaseAttacks = {
    AttackKind::kMisspelling, AttackKind::kCharSubstitution,
    AttackKind::kInvisibleChar, AttackKind::kPunctSubstitution,
    AttackKind::kCaseSwap};

inline constexpr std::array<AttackKind, 6> kAllAttacks = {
    AttackKind::kMisspelling,       AttackKind::kCharSubstitution,
    AttackKind::kInvisibleChar,     AttackKind::kPunctSubstitution,
    AttackKind::kCaseSwap,          AttackKind::kAllMixed};

std::string_view attack_name(AttackKind kind);
AttackKind parse_attack(std::string_view name);

struct AttackConfig {
  AttackKind kind = AttackKind::kAllMixed;
  double rate = 0.15;
  std::uint64_t seed = 0;
};

enum class MisspellOp { kTranspose, kDelete, kDuplicate, kKeyboardNeighbor };

// Latin -> Cyrillic/Greek confusables. No target code point is also a source,
// so applying the map twice never undoes or chains a substitution.
struct Homoglyph {
  char32_t latin;
  char32_t confusable;
  std::string_view script;
};
const std::vector<Homoglyph>& homoglyph_table();
std::optional<char32_t> homoglyph_for(char32_t cp);
inline constexpr int kHomoglyphTableVersion = 1;

inline constexpr std::array<char32_t, 4> kInvisibleChars = {
    U'\u200B', U'\u200C', U'\u200D', U'\u2060'};

// Punctuation replacement used by the punctuation attack, or nullopt for
// characters outside the map.
std::optional<char32_t> punct_replacement(char32_t cp);

std::optional<char32_t> keyboard_neighbor(char32_t cp, text::Rng& rng);

// Single-site edit primitives, exposed for tests. `pos` indexes code points.
std::string misspell(std::string_view token, MisspellOp op, std::size_t pos,
                     char32_t replacement = 0);
std::string substitute_char(std::string_view token, std::size_t pos);
std::string insert_invisible(std::string_view token, std::size_t pos,
                             char32_t mark);
std::string substitute_last_punct(std::string_view token);
std::string swap_case_at(std::string_view token,
                         const std::vector<std::size_t>& positions);

// True when the token has at least one site the attack can modify.
bool is_eligible(std::string_view token, AttackKind kind);

// Applies one edit of the given base kind. Returns nullopt when the token has
// no modification site. The result always differs from the input.
std::optional<std::string> perturb_token(std::string_view token,
                                         AttackKind kind, text::Rng& rng);

struct AttackTrace {
  std::vector<std::size_t> modified;   // token indices, ascending
  std::vector<AttackKind> kinds;       // per modified token
};

// Perturbs floor(rate * eligible) tokens selected by a stream seeded from
// (doc.id, seed, kind, rate). Labels, spans and token count are preserved.
corpus::Document apply_attack(const corpus::Document& doc,
                              const AttackConfig& cfg,
                              AttackTrace* trace = nullptr);

corpus::Document all_mixed(const corpus::Document& doc, double rate,
                           std::uint64_t seed, AttackTrace* trace = nullptr);

}  // namespace segmark::attacks
