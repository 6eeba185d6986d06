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

#include "segmark/config/toml.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace segmark::config {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool bare_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

Value parse_value(std::string_view v, std::size_t lineno) {
  if (v.empty()) throw TomlError(lineno, "missing value");
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw TomlError(lineno, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] != '\\') {
        out += v[i];
        continue;
      }
      if (++i + 1 >= v.size()) throw TomlError(lineno, "dangling escape");
      switch (v[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw TomlError(lineno, "unsupported escape");
      }
    }
    return out;
  }
  std::string digits;
  for (char c : v) {
    if (c != '_') digits += c;
  }
  const char* first = digits.data();
  const char* last = first + digits.size();
  if (*first == '+') ++first;
  const bool is_float = digits.find_first_of(".eE") != std::string::npos ||
                        digits == "inf" || digits == "nan";
  if (!is_float) {
    std::int64_t n = 0;
    const auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec == std::errc() && ptr == last) return n;
  } else {
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && ptr == last) return d;
  }
  throw TomlError(lineno, "unsupported value '" + std::string(v) + "'");
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    default: return "string";
  }
}

}  // namespace

Table Table::parse(std::string_view text) {
  Table t;
  std::string prefix;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3 || line[1] == '[') {
        throw TomlError(lineno, "malformed table header");
      }
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!bare_key(name)) throw TomlError(lineno, "unsupported table name");
      prefix = std::string(name) + ".";
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw TomlError(lineno, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!bare_key(key)) throw TomlError(lineno, "unsupported key '" + std::string(key) + "'");
    const std::string full = prefix + std::string(key);
    if (!t.values_.emplace(full, parse_value(trim(line.substr(eq + 1)), lineno)).second) {
      throw TomlError(lineno, "duplicate key " + full);
    }
  }
  return t;
}

Table Table::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

template <typename T>
const T& typed(const std::map<std::string, Value>& values, const std::string& key) {
  const Value& v = values.at(key);
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw std::invalid_argument("config key " + key + " has type " + type_name(v));
}

}  // namespace

bool Table::get_bool(const std::string& key, bool fallback) const {
  return contains(key) ? typed<bool>(values_, key) : fallback;
}

std::int64_t Table::get_int(const std::string& key, std::int64_t fallback) const {
  return contains(key) ? typed<std::int64_t>(values_, key) : fallback;
}

double Table::get_double(const std::string& key, double fallback) const {
  if (!contains(key)) return fallback;
  if (const auto* n = std::get_if<std::int64_t>(&values_.at(key))) return static_cast<double>(*n);
  return typed<double>(values_, key);
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? typed<std::string>(values_, key) : fallback;
}

}  // namespace segmark::config
