#include "rbgd_bench/toml_subset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace rbgd::bench {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const { throw TomlError(line_, what); }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }

  /// Whitespace, comments and newlines inside an array.
  void skip_array_space() { skip_blank_lines(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected text after value");
    newline();
  }

  std::string key() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    std::string k(text_.substr(start, pos_ - start));
    skip_spaces();
    if (peek() == '.') fail("dotted keys are not supported");
    return k;
  }

  nlohmann::json* header(nlohmann::json& root) {
    ++pos_;
    const bool array = peek() == '[';
    if (array) ++pos_;
    const std::string name = key();
    skip_spaces();
    if (peek() != ']') fail("expected ']'");
    ++pos_;
    if (array) {
      if (peek() != ']') fail("expected ']]'");
      ++pos_;
      nlohmann::json& slot = root[name];
      if (slot.is_null()) slot = nlohmann::json::array();
      if (!slot.is_array()) fail("'" + name + "' is already a table");
      slot.push_back(nlohmann::json::object());
      return &slot.back();
    }
    if (root.contains(name)) fail("table '" + name + "' defined twice");
    root[name] = nlohmann::json::object();
    return &root[name];
  }

  void key_value(nlohmann::json& table) {
    const std::string k = key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + k + "'");
    ++pos_;
    skip_spaces();
    if (table.contains(k)) fail("duplicate key '" + k + "'");
    table[k] = value();
  }

  nlohmann::json value() {
    const char c = peek();
    if (c == '"') {
      if (text_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return basic_string();
    }
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') fail("inline tables are not supported");
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  nlohmann::json array() {
    ++pos_;
    nlohmann::json out = nlohmann::json::array();
    skip_array_space();
    while (peek() != ']') {
      if (eof()) fail("unterminated array");
      out.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        skip_array_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return out;
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  nlohmann::json number() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                      peek() == '-' || peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string token;
    for (char c : text_.substr(start, pos_ - start)) {
      if (c != '_') token.push_back(c);
    }
    if (token.empty()) fail("expected a value");
    if (token == "inf" || token == "+inf" || token == "-inf" || token == "nan") {
      fail("non-finite numbers are not supported");
    }
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    const char* first = token.data() + (token[0] == '+' ? 1 : 0);
    const char* last = token.data() + token.size();
    if (!is_float) {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail("malformed integer '" + token + "'");
      return v;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      fail("malformed number '" + token + "'");
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text) { return Parser(text).parse(); }

}  // namespace rbgd::bench
