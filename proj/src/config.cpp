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

#include "hion/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hion {

namespace {

bool valid_key_part(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

struct ValueParser {
  const std::string& text;
  std::size_t pos = 0;
  const std::string& where;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(where + ": " + msg);
  }

  Config::Value parse() {
    skip_ws();
    if (pos >= text.size()) fail("missing value");
    Config::Value v;
    const char c = text[pos];
    if (c == '"') {
      ++pos;
      std::string out;
      while (pos < text.size() && text[pos] != '"') out.push_back(text[pos++]);
      if (pos >= text.size()) fail("unterminated string");
      ++pos;
      v.kind = Config::Value::Kind::string;
      v.str = std::move(out);
      return v;
    }
    if (c == '[') {
      ++pos;
      v.kind = Config::Value::Kind::array;
      skip_ws();
      if (pos < text.size() && text[pos] == ']') {
        ++pos;
        return v;
      }
      while (true) {
        v.arr.push_back(parse());
        skip_ws();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < text.size() && text[pos] == ']') {
          ++pos;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (text.compare(pos, 4, "true") == 0) {
      pos += 4;
      v.kind = Config::Value::Kind::boolean;
      v.b = true;
      return v;
    }
    if (text.compare(pos, 5, "false") == 0) {
      pos += 5;
      v.kind = Config::Value::Kind::boolean;
      v.b = false;
      return v;
    }
    char* end = nullptr;
    const double num = std::strtod(text.c_str() + pos, &end);
    if (end == text.c_str() + pos) fail("cannot parse value starting at \"" + text.substr(pos) + "\"");
    pos = static_cast<std::size_t>(end - text.c_str());
    v.kind = Config::Value::Kind::number;
    v.num = num;
    return v;
  }
};

std::string dump_value(const Config::Value& v) {
  switch (v.kind) {
    case Config::Value::Kind::boolean:
      return v.b ? "true" : "false";
    case Config::Value::Kind::number: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v.num);
      return buf;
    }
    case Config::Value::Kind::string:
      return "\"" + v.str + "\"";
    case Config::Value::Kind::array: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.arr.size(); ++i) {
        if (i) out += ", ";
        out += dump_value(v.arr[i]);
      }
      return out + "]";
    }
  }
  return "";
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = strip(line.substr(1, line.size() - 2));
      std::istringstream parts(section);
      std::string part;
      while (std::getline(parts, part, '.')) {
        if (!valid_key_part(part)) {
          throw ConfigError(where + ": invalid section name \"" + section + "\"");
        }
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (!valid_key_part(key)) throw ConfigError(where + ": invalid key \"" + key + "\"");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) throw ConfigError(where + ": duplicate key \"" + full + "\"");
    const std::string value_text = line.substr(eq + 1);
    ValueParser vp{value_text, 0, where};
    Value v = vp.parse();
    vp.skip_ws();
    if (vp.pos != value_text.size()) {
      throw ConfigError(where + ": trailing characters after value");
    }
    cfg.values_.emplace(full, std::move(v));
  }
  return cfg;
}

const Config::Value& Config::fetch(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(origin_ + ": missing required key \"" + key + "\"");
  }
  used_.insert(key);
  return it->second;
}

double Config::get_number(const std::string& key) const {
  const Value& v = fetch(key);
  if (v.kind != Value::Kind::number) throw ConfigError(origin_ + ": \"" + key + "\" must be a number");
  return v.num;
}

double Config::get_number_or(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const double v = get_number(key);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) {
    throw ConfigError(origin_ + ": \"" + key + "\" must be an integer");
  }
  return n;
}

long Config::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64_or(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const long v = get_int(key);
  if (v < 0) throw ConfigError(origin_ + ": \"" + key + "\" must be >= 0");
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = fetch(key);
  if (v.kind != Value::Kind::boolean) throw ConfigError(origin_ + ": \"" + key + "\" must be a boolean");
  return v.b;
}

std::string Config::get_string(const std::string& key) const {
  const Value& v = fetch(key);
  if (v.kind != Value::Kind::string) throw ConfigError(origin_ + ": \"" + key + "\" must be a string");
  return v.str;
}

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<double> Config::get_number_list(const std::string& key) const {
  const Value& v = fetch(key);
  if (v.kind != Value::Kind::array) throw ConfigError(origin_ + ": \"" + key + "\" must be an array");
  std::vector<double> out;
  for (const Value& e : v.arr) {
    if (e.kind != Value::Kind::number) {
      throw ConfigError(origin_ + ": \"" + key + "\" must contain numbers");
    }
    out.push_back(e.num);
  }
  return out;
}

std::vector<long> Config::get_int_list_or(const std::string& key, std::vector<long> fallback) const {
  if (!has(key)) return fallback;
  std::vector<long> out;
  for (double d : get_number_list(key)) {
    const long n = static_cast<long>(d);
    if (static_cast<double>(n) != d) {
      throw ConfigError(origin_ + ": \"" + key + "\" must contain integers");
    }
    out.push_back(n);
  }
  return out;
}

std::vector<std::string> Config::get_string_list_or(const std::string& key,
                                                    std::vector<std::string> fallback) const {
  if (!has(key)) return fallback;
  const Value& v = fetch(key);
  if (v.kind != Value::Kind::array) throw ConfigError(origin_ + ": \"" + key + "\" must be an array");
  std::vector<std::string> out;
  for (const Value& e : v.arr) {
    if (e.kind == Value::Kind::string) {
      out.push_back(e.str);
    } else if (e.kind == Value::Kind::number) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%g", e.num);
      out.emplace_back(buf);
    } else {
      throw ConfigError(origin_ + ": \"" + key + "\" must contain strings or numbers");
    }
  }
  return out;
}

std::vector<std::pair<double, double>> Config::get_pair_list(const std::string& key) const {
  const Value& v = fetch(key);
  if (v.kind != Value::Kind::array) throw ConfigError(origin_ + ": \"" + key + "\" must be an array");
  std::vector<std::pair<double, double>> out;
  for (const Value& e : v.arr) {
    if (e.kind != Value::Kind::array || e.arr.size() != 2 ||
        e.arr[0].kind != Value::Kind::number || e.arr[1].kind != Value::Kind::number) {
      throw ConfigError(origin_ + ": \"" + key + "\" must contain [time, value] pairs");
    }
    out.emplace_back(e.arr[0].num, e.arr[1].num);
  }
  return out;
}

std::string Config::get_scalar_as_string(const std::string& key) const {
  const Value& v = fetch(key);
  if (v.kind == Value::Kind::string) return v.str;
  if (v.kind == Value::Kind::number) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.num);
    return buf;
  }
  throw ConfigError(origin_ + ": \"" + key + "\" must be a number or a string");
}

std::string Config::get_scalar_as_string_or(const std::string& key,
                                            const std::string& fallback) const {
  return has(key) ? get_scalar_as_string(key) : fallback;
}

void Config::finish() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += "\"" + key + "\"";
    }
  }
  if (!unknown.empty()) {
    throw ConfigError(origin_ + ": unknown key(s): " + unknown);
  }
}

std::string Config::dump() const {
  // Group by section (prefix before the last dot), sections and keys sorted.
  std::map<std::string, std::map<std::string, const Value*>> sections;
  for (const auto& [key, value] : values_) {
    const std::size_t dot = key.rfind('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
    sections[sec][leaf] = &value;
  }
  std::string out;
  for (const auto& [sec, keys] : sections) {
    if (!sec.empty()) out += "[" + sec + "]\n";
    for (const auto& [leaf, value] : keys) {
      out += leaf + " = " + dump_value(*value) + "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace hion
