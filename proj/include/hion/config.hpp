/*
 Copyright 2026 The Hion Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hion/errors.hpp"

namespace hion {

/// Flat structured-text configuration: `[section.sub]` headers, `key = value`
/// entries, `#` comments. Values are booleans, numbers, quoted strings or
/// single-line (possibly nested) arrays. Keys address as dotted paths.
///
/// The reader is strict: every key must be consumed by the command that loads
/// the file; unconsumed keys are hard errors (finish()). Missing required
/// keys raise errors naming the full dotted path.
class Config {
 public:
  struct Value {
    enum class Kind { boolean, number, string, array };
    Kind kind = Kind::number;
    bool b = false;
    double num = 0.0;
    std::string str;
    std::vector<Value> arr;
  };

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_number(const std::string& key) const;
  double get_number_or(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_number_list(const std::string& key) const;
  std::vector<long> get_int_list_or(const std::string& key, std::vector<long> fallback) const;
  std::vector<std::string> get_string_list_or(const std::string& key,
                                              std::vector<std::string> fallback) const;
  /// Array of [number, number] pairs (reference schedules).
  std::vector<std::pair<double, double>> get_pair_list(const std::string& key) const;
  /// Number or string scalar, as written (sampling periods).
  std::string get_scalar_as_string(const std::string& key) const;
  std::string get_scalar_as_string_or(const std::string& key, const std::string& fallback) const;

  /// Throws if any key present in the file was never consumed.
  void finish() const;

  /// Serializes back to the file format (sections sorted, keys sorted);
  /// parseable by parse_string. Used for manifest config snapshots.
  std::string dump() const;

  const std::map<std::string, Value>& entries() const { return values_; }

 private:
  const Value& fetch(const std::string& key) const;
  std::map<std::string, Value> values_;
  std::string origin_;
  mutable std::set<std::string> used_;
};

}  // namespace hion
