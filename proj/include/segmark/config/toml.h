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
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace segmark::config {

// The subset of TOML used by segmark config files: [table] headers, and
// `key = value` lines whose value is a basic string, integer, float or
// boolean. '#' starts a comment outside strings. Arrays, inline tables,
// dotted keys and multi-line strings are rejected.
using Value = std::variant<bool, std::int64_t, double, std::string>;

class TomlError : public std::runtime_error {
 public:
  TomlError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Keys are "table.key", or "key" before any table header.
class Table {
 public:
  static Table parse(std::string_view text);
  static Table load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, Value>& values() const { return values_; }

  // Typed lookups; integers widen to double. Throw std::invalid_argument on a
  // type mismatch.
  bool get_bool(const std::string& key, bool fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

 private:
  std::map<std::string, Value> values_;
};

}  // namespace segmark::config
