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

#include "segmark/attacks/attacks.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "segmark/text/utf8.h"

namespace segmark::attacks {
namespace {

using text::Rng;

// Physically adjacent keys on a US QWERTY layout, indexed by letter.
constexpr std::string_view kQwertyNeighbors[26] = {
    "qwsz", "vghn", "xdfv", "serfcx", "wrsd", "drtgvc", "ftyhbv",
    "gyujnb", "uojk", "huikmn", "jiolm", "kop", "njk", "bhjm",
    "ipkl", "ol", "wa", "etdf", "awedxz", "ryfg", "yihj",
    "cfgb", "qeas", "zsdc", "tugh", "asx"};

bool has_case(char32_t cp) { return text::is_ascii_alpha(cp); }

char32_t flip_case(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return cp - U'a' + U'A';
  if (cp >= U'A' && cp <= U'Z') return cp - U'A' + U'a';
  return cp;
}

std::vector<std::size_t> positions_where(const std::vector<char32_t>& cps,
                                         auto pred) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (pred(cps[i])) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> transpose_sites(const std::vector<char32_t>& cps) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    if (text::is_ascii_alpha(cps[i]) && text::is_ascii_alpha(cps[i + 1]) &&
        cps[i] != cps[i + 1]) {
      out.push_back(i);
    }
  }
  return out;
}

std::size_t pick(const std::vector<std::size_t>& v, Rng& rng) {
  return v[rng.uniform_index(v.size())];
}

std::optional<std::string> misspell_random(const std::vector<char32_t>& cps,
                                           Rng& rng) {
  const auto letters = positions_where(cps, text::is_ascii_alpha);
  if (letters.empty()) return std::nullopt;
  const auto swaps = transpose_sites(cps);
  std::vector<MisspellOp> ops;
  if (!swaps.empty()) ops.push_back(MisspellOp::kTranspose);
  if (cps.size() > 2) ops.push_back(MisspellOp::kDelete);
  ops.push_back(MisspellOp::kDuplicate);
  ops.push_back(MisspellOp::kKeyboardNeighbor);

  const std::string token = text::encode_utf8(cps);
  const MisspellOp op = ops[rng.uniform_index(ops.size())];
  switch (op) {
    case MisspellOp::kTranspose:
      return misspell(token, op, pick(swaps, rng));
    case MisspellOp::kDelete:
    case MisspellOp::kDuplicate:
      return misspell(token, op, pick(letters, rng));
    case MisspellOp::kKeyboardNeighbor: {
      const std::size_t pos = pick(letters, rng);
      const char32_t repl = *keyboard_neighbor(cps[pos], rng);
      return misspell(token, op, pos, repl);
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::kMisspelling:
      return "misspelling";
    case AttackKind::kCharSubstitution:
      return "char_substitution";
    case AttackKind::kInvisibleChar:
      return "invisible_char";
    case AttackKind::kPunctSubstitution:
      return "punct_substitution";
    case AttackKind::kCaseSwap:
      return "case_swap";
    case AttackKind::kAllMixed:
      return "all_mixed";
  }
  return "all_mixed";
}

AttackKind parse_attack(std::string_view name) {
  for (AttackKind k : kAllAttacks) {
    if (attack_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown attack kind '" + std::string(name) + "'");
}

const std::vector<Homoglyph>& homoglyph_table() {
  // Keep in sync with data/homoglyphs.v1.tsv.
  static const std::vector<Homoglyph> table = {
      {U'a', U'\u0430', "Cyrillic"}, {U'c', U'\u0441', "Cyrillic"},
      {U'e', U'\u0435', "Cyrillic"}, {U'i', U'\u0456', "Cyrillic"},
      {U'j', U'\u0458', "Cyrillic"}, {U'o', U'\u043E', "Cyrillic"},
      {U'p', U'\u0440', "Cyrillic"}, {U's', U'\u0455', "Cyrillic"},
      {U'x', U'\u0445', "Cyrillic"}, {U'y', U'\u0443', "Cyrillic"},
      {U'v', U'\u03BD', "Greek"},    {U'A', U'\u0410', "Cyrillic"},
      {U'B', U'\u0412', "Cyrillic"}, {U'C', U'\u0421', "Cyrillic"},
      {U'E', U'\u0415', "Cyrillic"}, {U'H', U'\u041D', "Cyrillic"},
      {U'K', U'\u041A', "Cyrillic"}, {U'M', U'\u041C', "Cyrillic"},
      {U'O', U'\u041E', "Cyrillic"}, {U'P', U'\u0420', "Cyrillic"},
      {U'T', U'\u0422', "Cyrillic"}, {U'X', U'\u0425', "Cyrillic"},
      {U'Y', U'\u03A5', "Greek"},    {U'N', U'\u039D', "Greek"},
  };
  return table;
}

std::optional<char32_t> homoglyph_for(char32_t cp) {
  for (const Homoglyph& h : homoglyph_table()) {
    if (h.latin == cp) return h.confusable;
  }
  return std::nullopt;
}

std::optional<char32_t> punct_replacement(char32_t cp) {
  switch (cp) {
    case U'.':
      return U';';
    case U';':
      return U'.';
    case U',':
      return U';';
    case U'!':
      return U'.';
    case U'?':
      return U'.';
    case U':':
      return U';';
    case U'"':
      return U'\'';
    default:
      return std::nullopt;
  }
}

std::optional<char32_t> keyboard_neighbor(char32_t cp, Rng& rng) {
  if (!text::is_ascii_alpha(cp)) return std::nullopt;
  const bool upper = cp <= U'Z';
  const std::size_t idx = upper ? cp - U'A' : cp - U'a';
  const std::string_view candidates = kQwertyNeighbors[idx];
  const char chosen = candidates[rng.uniform_index(candidates.size())];
  return upper ? static_cast<char32_t>(chosen - 'a' + 'A')
               : static_cast<char32_t>(chosen);
}

std::string misspell(std::string_view token, MisspellOp op, std::size_t pos,
                     char32_t replacement) {
  std::vector<char32_t> cps = text::to_code_points(token);
  if (pos >= cps.size()) throw std::out_of_range("misspell: position");
  switch (op) {
    case MisspellOp::kTranspose:
      if (pos + 1 >= cps.size()) throw std::out_of_range("misspell: position");
      std::swap(cps[pos], cps[pos + 1]);
      break;
    case MisspellOp::kDelete:
      cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(pos));
      break;
    case MisspellOp::kDuplicate:
      cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(pos), cps[pos]);
      break;
    case MisspellOp::kKeyboardNeighbor:
      cps[pos] = replacement;
      break;
  }
  return text::encode_utf8(cps);
}

std::string substitute_char(std::string_view token, std::size_t pos) {
  std::vector<char32_t> cps = text::to_code_points(token);
  const auto sub = homoglyph_for(cps.at(pos));
  if (!sub) throw std::invalid_argument("substitute_char: no homoglyph");
  cps[pos] = *sub;
  return text::encode_utf8(cps);
}

std::string insert_invisible(std::string_view token, std::size_t pos,
                             char32_t mark) {
  std::vector<char32_t> cps = text::to_code_points(token);
  if (pos == 0 || pos >= cps.size()) {
    throw std::out_of_range("insert_invisible: position must be interior");
  }
  cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(pos), mark);
  return text::encode_utf8(cps);
}

std::string substitute_last_punct(std::string_view token) {
  std::vector<char32_t> cps = text::to_code_points(token);
  for (std::size_t i = cps.size(); i-- > 0;) {
    if (auto r = punct_replacement(cps[i])) {
      cps[i] = *r;
      return text::encode_utf8(cps);
    }
  }
  throw std::invalid_argument("substitute_last_punct: no mapped punctuation");
}

std::string swap_case_at(std::string_view token,
                         const std::vector<std::size_t>& positions) {
  std::vector<char32_t> cps = text::to_code_points(token);
  for (std::size_t p : positions) cps.at(p) = flip_case(cps.at(p));
  return text::encode_utf8(cps);
}

bool is_eligible(std::string_view token, AttackKind kind) {
  const std::vector<char32_t> cps = text::to_code_points(token);
  const auto any = [&](auto pred) {
    return std::any_of(cps.begin(), cps.end(), pred);
  };
  switch (kind) {
    case AttackKind::kMisspelling:
      return any(text::is_ascii_alpha);
    case AttackKind::kCharSubstitution:
      return any([](char32_t c) { return homoglyph_for(c).has_value(); });
    case AttackKind::kInvisibleChar:
      return cps.size() >= 2;
    case AttackKind::kPunctSubstitution:
      return any([](char32_t c) { return punct_replacement(c).has_value(); });
    case AttackKind::kCaseSwap:
      return any(has_case);
    case AttackKind::kAllMixed:
      for (AttackKind k : kBaseAttacks) {
        if (is_eligible(token, k)) return true;
      }
      return false;
  }
  return false;
}

std::optional<std::string> perturb_token(std::string_view token,
                                         AttackKind kind, Rng& rng) {
  if (!is_eligible(token, kind)) return std::nullopt;
  const std::vector<char32_t> cps = text::to_code_points(token);
  switch (kind) {
    case AttackKind::kMisspelling:
      return misspell_random(cps, rng);
    case AttackKind::kCharSubstitution:
      return substitute_char(
          token, pick(positions_where(cps,
                                      [](char32_t c) {
                                        return homoglyph_for(c).has_value();
                                      }),
                      rng));
    case AttackKind::kInvisibleChar: {
      const std::size_t pos = 1 + rng.uniform_index(cps.size() - 1);
      const char32_t mark =
          kInvisibleChars[rng.uniform_index(kInvisibleChars.size())];
      return insert_invisible(token, pos, mark);
    }
    case AttackKind::kPunctSubstitution:
      return substitute_last_punct(token);
    case AttackKind::kCaseSwap: {
      const auto sites = positions_where(cps, has_case);
      std::vector<std::size_t> flips;
      for (std::size_t s : sites) {
        if (rng.bernoulli(0.5)) flips.push_back(s);
      }
      if (flips.empty()) flips.push_back(pick(sites, rng));
      return swap_case_at(token, flips);
    }
    case AttackKind::kAllMixed: {
      std::vector<AttackKind> usable;
      for (AttackKind k : kBaseAttacks) {
        if (is_eligible(token, k)) usable.push_back(k);
      }
      return perturb_token(token, usable[rng.uniform_index(usable.size())],
                           rng);
    }
  }
  return std::nullopt;
}

corpus::Document apply_attack(const corpus::Document& doc,
                              const AttackConfig& cfg, AttackTrace* trace) {
  if (!(cfg.rate >= 0.0 && cfg.rate <= 1.0)) {
    throw std::invalid_argument("attack rate must lie in [0,1]");
  }
  std::uint64_t stream = text::fnv1a64(doc.id);
  stream = text::combine_seed(stream, cfg.seed);
  stream = text::combine_seed(stream, static_cast<std::uint64_t>(cfg.kind));
  stream = text::combine_seed(stream, std::bit_cast<std::uint64_t>(cfg.rate));
  Rng rng(stream);

  std::vector<std::size_t> eligible;
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    if (is_eligible(doc.tokens[t].text, cfg.kind)) eligible.push_back(t);
  }
  // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
  const auto count = static_cast<std::size_t>(
      std::floor(cfg.rate * static_cast<double>(eligible.size()) + 1e-9));
  std::vector<std::size_t> chosen;
  for (std::size_t i : rng.sample_indices(eligible.size(), count)) {
    chosen.push_back(eligible[i]);
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<std::string> texts;
  texts.reserve(doc.tokens.size());
  for (const corpus::Token& t : doc.tokens) texts.push_back(t.text);
  AttackTrace local;
  for (std::size_t t : chosen) {
    AttackKind kind = cfg.kind;
    if (kind == AttackKind::kAllMixed) {
      std::vector<AttackKind> usable;
      for (AttackKind k : kBaseAttacks) {
        if (is_eligible(texts[t], k)) usable.push_back(k);
      }
      kind = usable[rng.uniform_index(usable.size())];
    }
    texts[t] = *perturb_token(texts[t], kind, rng);
    local.modified.push_back(t);
    local.kinds.push_back(kind);
  }

  corpus::Document out = corpus::with_token_texts(doc, texts);
  out.meta.attack = std::string(attack_name(cfg.kind));
  if (trace) *trace = std::move(local);
  return out;
}

corpus::Document all_mixed(const corpus::Document& doc, double rate,
                           std::uint64_t seed, AttackTrace* trace) {
  return apply_attack(doc, {AttackKind::kAllMixed, rate, seed}, trace);
}

}  // namespace segmark::attacks
