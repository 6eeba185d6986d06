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

#include "segmark/corpus/synthetic.h"

#include <array>
#include <string_view>

#include "segmark/text/rng.h"

namespace segmark::corpus {

namespace {

constexpr std::array<const char*, 40> kFunctionWords = {
    "the", "a", "of", "and", "to", "in", "it", "that", "was", "he",
    "she", "on", "with", "for", "as", "at", "but", "they", "his", "her",
    "we", "this", "from", "or", "by", "not", "so", "if", "up", "out",
    "you", "them", "an", "into", "about", "our", "some", "no", "than", "all"};

constexpr std::array<const char*, 14> kOnsets = {
    "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w"};
constexpr std::array<const char*, 5> kVowels = {"a", "e", "i", "o", "u"};
constexpr std::array<const char*, 6> kCodas = {"", "", "n", "t", "r", "m"};
constexpr std::array<const char*, 8> kAiSuffixes = {
    "ation", "ity", "ive", "ical", "ment", "ism", "ology", "ency"};

std::string syllable(text::Rng& rng) {
  std::string s = kOnsets[rng.uniform_index(kOnsets.size())];
  s += kVowels[rng.uniform_index(kVowels.size())];
  s += kCodas[rng.uniform_index(kCodas.size())];
  return s;
}

// Distinct pseudo-words of the given syllable range, optionally suffixed.
std::vector<std::string> make_pool(std::size_t n, int min_syl, int max_syl,
                                   bool ai_suffix, text::Rng& rng,
                                   std::vector<std::string>& taken) {
  std::vector<std::string> pool;
  while (pool.size() < n) {
    const int syl = min_syl + static_cast<int>(rng.uniform_index(
                                  static_cast<std::uint64_t>(max_syl - min_syl + 1)));
    std::string w;
    for (int i = 0; i < syl; ++i) w += syllable(rng);
    if (ai_suffix) w += kAiSuffixes[rng.uniform_index(kAiSuffixes.size())];
    bool dup = false;
    for (const auto& t : taken) {
      if (t == w) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    for (const char* f : kFunctionWords) dup = dup || w == f;
    if (dup) continue;
    taken.push_back(w);
    pool.push_back(std::move(w));
  }
  return pool;
}

struct Pools {
  std::vector<std::string> shared;
  std::vector<std::string> human;
  std::vector<std::string> ai;
};

Pools make_pools(std::uint64_t seed) {
  text::Rng rng(text::combine_seed(seed, 0x706f6f6cULL));
  std::vector<std::string> taken;
  Pools p;
  p.shared = make_pool(400, 2, 2, false, rng, taken);
  p.human = make_pool(600, 1, 2, false, rng, taken);
  p.ai = make_pool(150, 2, 3, true, rng, taken);
  return p;
}

struct Style {
  std::size_t min_len, max_len;
  double function_rate;
  double private_rate;
  double comma_rate;
  bool ai;
};

void append_sentence(const Style& st, const Pools& pools, text::Rng& rng,
                     std::vector<std::string>& words) {
  const std::size_t len =
      st.min_len + rng.uniform_index(st.max_len - st.min_len + 1);
  const std::vector<std::string>& priv = st.ai ? pools.ai : pools.human;
  const std::size_t start = words.size();
  for (std::size_t i = 0; i < len; ++i) {
    std::string w;
    if (rng.bernoulli(st.function_rate)) {
      w = kFunctionWords[rng.uniform_index(kFunctionWords.size())];
    } else if (rng.bernoulli(st.private_rate)) {
      w = priv[rng.uniform_index(priv.size())];
    } else {
      w = pools.shared[rng.uniform_index(pools.shared.size())];
    }
    if (i + 1 < len && rng.bernoulli(st.comma_rate)) {
      w += st.ai && rng.bernoulli(0.4) ? ";" : ",";
    }
    words.push_back(std::move(w));
  }
  words[start][0] = static_cast<char>(words[start][0] - 'a' + 'A');
  if (st.ai) {
    words.back() += ".";
  } else {
    const double r = rng.uniform();
    words.back() += r < 0.1 ? "?" : (r < 0.15 ? "!" : ".");
  }
}

}  // namespace

std::vector<Document> generate_synthetic(const SynthConfig& cfg) {
  const Pools pools = make_pools(cfg.seed);
  const Style human{6, 14, cfg.human_function_rate, cfg.human_private_rate,
                    cfg.human_comma_rate, false};
  const Style ai{16, 26, cfg.ai_function_rate, cfg.ai_private_rate,
                 cfg.ai_comma_rate, true};
  static constexpr std::array<const char*, 3> kDomains = {"news", "essay", "review"};

  text::Rng rng(text::combine_seed(cfg.seed, 0x646f6373ULL));
  std::vector<Document> docs;
  docs.reserve(cfg.documents);
  for (std::size_t d = 0; d < cfg.documents; ++d) {
    const std::size_t target =
        cfg.min_tokens + rng.uniform_index(cfg.max_tokens - cfg.min_tokens + 1);
    std::vector<bool> plan;  // segment styles, true = AI
    std::string form;
    if (rng.bernoulli(cfg.fully_human_rate)) {
      plan = {false};
      form = "human";
    } else {
      switch (rng.uniform_index(3)) {
        case 0:
          plan = {false, true};
          form = "human_ai";
          break;
        case 1:
          plan = {true, false};
          form = "ai_human";
          break;
        default: {
          const bool first_ai = rng.bernoulli(0.5);
          const std::size_t segs = 3 + rng.uniform_index(2);
          for (std::size_t s = 0; s < segs; ++s) plan.push_back(first_ai == (s % 2 == 0));
          form = "mixed";
        }
      }
    }
    const std::size_t per_seg = target / plan.size();
    std::vector<std::string> words;
    std::vector<int> labels;
    for (bool is_ai : plan) {
      const std::size_t seg_start = words.size();
      do {
        append_sentence(is_ai ? ai : human, pools, rng, words);
      } while (words.size() - seg_start < per_seg);
      labels.resize(words.size(), is_ai ? 1 : 0);
    }
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) text += ' ';
      text += words[i];
    }
    DocumentMeta meta;
    meta.domain = kDomains[d % kDomains.size()];
    meta.generator = "synthetic-" + form;
    docs.push_back(make_document("syn-" + std::to_string(d), std::move(text),
                                 std::move(labels), std::move(meta)));
  }
  return docs;
}

}  // namespace segmark::corpus
