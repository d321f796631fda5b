#pragma once

// Line-oriented token reader and number formatting shared by the readers and
// writers in formats.cpp.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stixels/formats.hpp"

namespace stixels::text {

struct Token {
  std::string_view text;
  std::size_t column = 1;  // 1-based
};

/// Yields non-blank, non-comment lines split on whitespace.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// False at end of input.
  bool next() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      tokens_.clear();
      std::size_t i = 0;
      while (i < line_.size()) {
        while (i < line_.size() && std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
        if (i >= line_.size() || line_[i] == '#') break;
        std::size_t j = i;
        while (j < line_.size() && !std::isspace(static_cast<unsigned char>(line_[j]))) ++j;
        tokens_.push_back({std::string_view(line_).substr(i, j - i), i + 1});
        i = j;
      }
      if (!tokens_.empty()) return true;
    }
    tokens_.clear();
    return false;
  }

  /// Peek-style pushback of the current line: the next call to next() returns
  /// it again.
  void hold() { held_ = true; }

  bool advance() {
    if (held_) {
      held_ = false;
      return !tokens_.empty();
    }
    return next();
  }

  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  std::size_t line() const { return line_no_; }

  [[noreturn]] void fail(std::size_t token, const std::string& msg) const {
    const std::size_t col =
        token < tokens_.size() ? tokens_[token].column : line_.size() + 1;
    throw FormatError(line_no_, col, msg);
  }
  [[noreturn]] void fail_at_end(const std::string& msg) const {
    throw FormatError(line_no_ + 1, 1, msg);
  }

  std::string_view word(std::size_t i) const {
    if (i >= tokens_.size()) fail(i, "expected more fields");
    return tokens_[i].text;
  }

  void expect_count(std::size_t n) const {
    if (tokens_.size() != n) {
      fail(std::min(n, tokens_.size()),
           "expected " + std::to_string(n) + " fields, found " +
               std::to_string(tokens_.size()));
    }
  }

  double number(std::size_t i) const {
    const auto w = word(i);
    if (w == "inf") return std::numeric_limits<double>::infinity();
    if (w == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = w.data() + w.size();
    auto [ptr, ec] = std::from_chars(w.data(), end, v);
    if (ec != std::errc() || ptr != end || std::isnan(v)) {
      fail(i, "expected a number, found '" + std::string(w) + "'");
    }
    return v;
  }

  std::size_t count(std::size_t i) const {
    const auto w = word(i);
    std::size_t v = 0;
    const char* end = w.data() + w.size();
    auto [ptr, ec] = std::from_chars(w.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      fail(i, "expected a non-negative integer, found '" + std::string(w) + "'");
    }
    return v;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::vector<Token> tokens_;
  bool held_ = false;
};

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace stixels::text
