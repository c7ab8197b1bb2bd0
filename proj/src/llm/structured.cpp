// Copyright 2026 The glagent Authors.
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

#include "glagent/llm/structured.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "glagent/error.hpp"

namespace glagent::llm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct ParseFailure {
  std::string what;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::size_t pos = 0;

  // Parses the object starting at pos (which must hold '{').
  Json object() {
    expect('{');
    Json out = Json::object();
    skip_ws();
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos;
        return out;
      }
      std::string k = key();
      skip_ws();
      expect(':');
      current_key = k;
      Json v = value("},");
      out[k] = std::move(v);
      skip_ws();
      if (peek() == ',') {
        ++pos;
        continue;
      }
      if (peek() == '}') {
        ++pos;
        return out;
      }
      fail("expected ',' or '}'");
    }
  }

  std::string current_key = "<key>";

 private:
  const std::string& s_;

  char peek() const { return pos < s_.size() ? s_[pos] : '\0'; }
  bool at_end() const { return pos >= s_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& why) const { throw ParseFailure{why}; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  // A closing quote only counts when what follows can end a token; this
  // keeps apostrophes inside single-quoted prose.
  bool closes_token(std::size_t after) const {
    std::size_t i = after;
    while (i < s_.size() && std::isspace(static_cast<unsigned char>(s_[i]))) ++i;
    if (i >= s_.size()) return true;
    const char c = s_[i];
    return c == ',' || c == '}' || c == ']' || c == ':';
  }

  std::string quoted() {
    const char q = s_[pos++];
    std::string out;
    while (!at_end()) {
      char c = s_[pos++];
      if (c == '\\' && !at_end()) {
        char e = s_[pos++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case 'u':
            if (pos + 4 <= s_.size()) {
              const unsigned long cp = std::strtoul(s_.substr(pos, 4).c_str(), nullptr, 16);
              pos += 4;
              append_utf8(out, cp);
            }
            break;
          default: out += e;  // \' \" \\ and stray escapes such as \_
        }
        continue;
      }
      if (c == q && closes_token(pos)) return out;
      out += c;
    }
    fail("unterminated string");
  }

  static void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string strip_quotes(std::string k) {
    k = trim(k);
    while (!k.empty() && (k.front() == '\'' || k.front() == '"')) k.erase(k.begin());
    while (!k.empty() && (k.back() == '\'' || k.back() == '"')) k.pop_back();
    return trim(k);
  }

  std::string key() {
    skip_ws();
    if (peek() == '\'' || peek() == '"') {
      std::string k = quoted();
      return strip_quotes(k);
    }
    const std::size_t start = pos;
    while (!at_end() && s_[pos] != ':' && s_[pos] != '}' && s_[pos] != ',') ++pos;
    if (peek() != ':') fail("key without ':'");
    std::string k = strip_quotes(s_.substr(start, pos - start));
    if (k.empty()) fail("empty key");
    return k;
  }

  Json scalar_from_bare(const std::string& raw) {
    const std::string t = trim(raw);
    if (t == "True" || t == "true") return true;
    if (t == "False" || t == "false") return false;
    if (t == "None" || t == "null") return nullptr;
    if (!t.empty()) {
      char* end = nullptr;
      const long long i = std::strtoll(t.c_str(), &end, 10);
      if (end && *end == '\0') return i;
      const double d = std::strtod(t.c_str(), &end);
      if (end && *end == '\0') return d;
    }
    return strip_quotes(t);
  }

  Json value(const char* terminators) {
    skip_ws();
    const char c = peek();
    if (c == '{') return object_nested();
    if (c == '[') {
      ++pos;
      Json arr = Json::array();
      while (true) {
        skip_ws();
        if (peek() == ']') {
          ++pos;
          return arr;
        }
        arr.push_back(value("],"));
        skip_ws();
        if (peek() == ',') {
          ++pos;
          continue;
        }
        if (peek() == ']') {
          ++pos;
          return arr;
        }
        fail("expected ',' or ']'");
      }
    }
    if (c == '\'' || c == '"') return quoted();
    const std::size_t start = pos;
    while (!at_end()) {
      const char d = s_[pos];
      bool stop = false;
      for (const char* t = terminators; *t; ++t) stop = stop || d == *t;
      if (stop || d == '{' || d == '[' || d == ']' || d == '}') break;
      ++pos;
    }
    if (at_end()) fail("value runs past the end of the text");
    if (pos == start || trim(s_.substr(start, pos - start)).empty()) fail("empty value");
    return scalar_from_bare(s_.substr(start, pos - start));
  }

  Json object_nested() {
    const std::string saved = current_key;
    Json o = object();
    current_key = saved;
    return o;
  }
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "'";
}

void write(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += quote(it.key());
        out += ": ";
        write(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        write(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::string: out += quote(v.get<std::string>()); break;
    case Json::value_t::boolean: out += v.get<bool>() ? "True" : "False"; break;
    case Json::value_t::null: out += "None"; break;
    case Json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      std::string s = buf;
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      break;
    }
    default: out += v.dump();
  }
}

}  // namespace

Json parse_structured(const std::string& text, const std::vector<std::string>& expected_keys) {
  Json merged = Json::object();
  bool found = false;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      ++i;
      continue;
    }
    Parser p(text);
    p.pos = i;
    try {
      Json block = p.object();
      for (auto it = block.begin(); it != block.end(); ++it) merged[it.key()] = it.value();
      found = true;
    } catch (const ParseFailure& f) {
      throw Error(ErrorCode::MalformedValue, p.current_key + " (" + f.what + ")");
    }
    i = p.pos;
  }
  if (!found) throw Error(ErrorCode::NoStructuredBlock, "no brace-delimited block in the response");
  for (const auto& k : expected_keys)
    if (!merged.contains(k)) throw Error(ErrorCode::MissingKey, k);
  return merged;
}

std::string serialize(const Json& map) {
  std::string out;
  write(map, out);
  return out;
}

}  // namespace glagent::llm
