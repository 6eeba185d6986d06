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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "segmark/text/utf8.h"

namespace segmark::attacks {
namespace {

using corpus::Document;

TEST_CASE("attack names round trip") {
  for (AttackKind k : kAllAttacks) CHECK(parse_attack(attack_name(k)) == k);
  CHECK_THROWS(parse_attack("paraphrase"));
}

TEST_CASE("misspelling primitives") {
  // Positions are zero-based code points; a transposition swaps pos and pos+1.
  CHECK(misspell("hello", MisspellOp::kTranspose, 3) == "helol");
  CHECK(misspell("hello", MisspellOp::kDelete, 0) == "ello");
  CHECK(misspell("hello", MisspellOp::kDuplicate, 1) == "heello");
  CHECK(misspell("hello", MisspellOp::kKeyboardNeighbor, 0, U'j') == "jello");
  CHECK_THROWS_AS(misspell("hello", MisspellOp::kTranspose, 4), std::out_of_range);
}

TEST_CASE("seeded misspelling is pinned") {
  // Golden values recorded from the generator.
  text::Rng r0(0), r3(3);
  CHECK(*perturb_token("hello", AttackKind::kMisspelling, r0) == "ehllo");
  CHECK(*perturb_token("hello", AttackKind::kMisspelling, r3) == "helo");
}

TEST_CASE("invisible character, case swap and punctuation primitives") {
  CHECK(insert_invisible("cat", 1, U'\u200B') == "c\u200Bat");
  CHECK_THROWS_AS(insert_invisible("cat", 0, U'\u200B'), std::out_of_range);
  CHECK(swap_case_at("Hello", {0, 1, 2, 3, 4}) == "hELLO");
  CHECK(substitute_last_punct("end.") == "end;");
  CHECK(substitute_last_punct("a,b!") == "a,b.");
  CHECK(substitute_last_punct("\"quote\"") == "\"quote'");
  CHECK_THROWS(substitute_last_punct("plain"));
  CHECK(substitute_char("cat", 1) == "c\u0430t");
}

TEST_CASE("eligibility") {
  CHECK(is_eligible("abc", AttackKind::kMisspelling));
  CHECK_FALSE(is_eligible("123", AttackKind::kMisspelling));
  CHECK_FALSE(is_eligible("a", AttackKind::kInvisibleChar));
  CHECK_FALSE(is_eligible("word", AttackKind::kPunctSubstitution));
  CHECK(is_eligible("word.", AttackKind::kPunctSubstitution));
  CHECK_FALSE(is_eligible("-", AttackKind::kAllMixed));
}

TEST_CASE("shipped homoglyph file matches the compiled table") {
  std::ifstream in(std::string(SEGMARK_DATA_DIR) + "/homoglyphs.v1.tsv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("version " + std::to_string(kHomoglyphTableVersion)) != std::string::npos);
  std::vector<Homoglyph> from_file;
  std::vector<std::string> scripts;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string latin, conf, script;
    std::getline(ss, latin, '\t');
    std::getline(ss, conf, '\t');
    std::getline(ss, script, '\t');
    scripts.push_back(script);
    from_file.push_back({static_cast<char32_t>(std::stoul(latin.substr(2), nullptr, 16)),
                         static_cast<char32_t>(std::stoul(conf.substr(2), nullptr, 16)), ""});
  }
  const auto& table = homoglyph_table();
  REQUIRE(from_file.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(from_file[i].latin == table[i].latin);
    CHECK(from_file[i].confusable == table[i].confusable);
    CHECK(scripts[i] == table[i].script);
    CHECK(homoglyph_for(table[i].latin) == table[i].confusable);
  }
  CHECK(table.size() >= 20);
}

Document sample_doc() {
  return corpus::parse_tagged("The cat sat. <AI_Start>It was, in fact, quite happy!</AI_End> Done?", "s1");
}

TEST_CASE("rate 0 is the identity except for meta.attack") {
  const Document d = sample_doc();
  for (AttackKind k : kAllAttacks) {
    Document out = apply_attack(d, {k, 0.0, 5});
    CHECK(out.meta.attack == std::string(attack_name(k)));
    out.meta.attack.reset();
    CHECK(out == d);
  }
}

TEST_CASE("rate 1 perturbs every eligible token with per-token kinds") {
  const Document d = corpus::make_document("five", "Alpha beta, gamma. Delta epsilon!", {0, 0, 1, 1, 0});
  AttackTrace trace;
  const Document out = all_mixed(d, 1.0, 3, &trace);
  CHECK(trace.modified == std::vector<std::size_t>{0, 1, 2, 3, 4});
  REQUIRE(trace.kinds.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) CHECK(out.tokens[t].text != d.tokens[t].text);
  CHECK(out.labels == d.labels);
  CHECK(out.gold_spans == d.gold_spans);
}

TEST_CASE("rate 0.2 on ten eligible tokens modifies exactly two") {
  // Every token is eligible for every kind.
  const Document d = corpus::make_document(
      "ten", "Aca, Ecb, Occ, Acd, Ece, Ocf, Acg, Ech, Oci, Acj,", std::vector<int>(10, 0));
  for (AttackKind k : kAllAttacks) {
    for (const auto& t : d.tokens) REQUIRE(is_eligible(t.text, k));
    AttackTrace trace;
    const Document out = apply_attack(d, {k, 0.2, 11}, &trace);
    CHECK(trace.modified.size() == 2);
    std::size_t changed = 0;
    for (std::size_t t = 0; t < 10; ++t) changed += out.tokens[t].text != d.tokens[t].text;
    CHECK(changed == 2);
  }
}

TEST_CASE("attacks are deterministic and preserve structure") {
  text::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Document d = oracle::random_document(rng, "r" + std::to_string(trial), 1, 40);
    for (AttackKind k : kAllAttacks) {
      const AttackConfig cfg{k, 0.3, 77};
      const Document a = apply_attack(d, cfg), b = apply_attack(d, cfg);
      CHECK(a == b);
      CHECK(a.size() == d.size());
      CHECK(a.labels == d.labels);
      CHECK_NOTHROW(corpus::validate(a));
    }
  }
}

TEST_CASE("invisible characters never split a token") {
  const Document d = corpus::make_document("z", "word another thing", {0, 1, 0});
  const Document out = apply_attack(d, {AttackKind::kInvisibleChar, 1.0, 2});
  CHECK(corpus::tokenize(out.raw_text).size() == 3);
}

TEST_CASE("invalid rates are rejected") {
  const Document d = sample_doc();
  CHECK_THROWS_AS(apply_attack(d, {AttackKind::kCaseSwap, 1.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_attack(d, {AttackKind::kCaseSwap, -0.1, 0}), std::invalid_argument);
}

}  // namespace
}  // namespace segmark::attacks
