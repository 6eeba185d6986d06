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
#include <string>
#include <string_view>
#include <vector>

namespace segmark::text {

// A decoded code point together with its UTF-8 byte range in the source.
struct CodePoint {
  char32_t value = 0;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
};

// Lenient decoder: invalid sequences decode to U+FFFD one byte at a time, so
// every input byte belongs to exactly one code point.
std::vector<CodePoint> decode_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);
std::vector<char32_t> to_code_points(std::string_view s);

// White_Space property (Unicode 15). Zero-width characters such as U+200B are
// format characters, not whitespace.
bool is_whitespace(char32_t cp);

// General category P* (punctuation). Covers ASCII, Latin-1, General
// Punctuation, Supplemental Punctuation, CJK and fullwidth punctuation blocks.
bool is_punctuation(char32_t cp);

inline bool is_ascii_alpha(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}
inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

// Letters from Latin, Greek and Cyrillic blocks.
bool is_letter(char32_t cp);

bool contains_punctuation(std::string_view s);
bool contains_letter(std::string_view s);

// ASCII-only case folding; non-ASCII bytes pass through unchanged.
std::string ascii_lower(std::string_view s);

// Lowercased token with leading/trailing punctuation removed.
std::string strip_punctuation_lower(std::string_view s);

}  // namespace segmark::text
