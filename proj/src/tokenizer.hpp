#pragma once

// Whitespace tokenizer shared by the LEF, DEF and Verilog readers. Each
// character in `punct` becomes a token of its own; `comment` starts a
// comment that runs to end of line.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "abutcheck/errors.hpp"
#include "abutcheck/geometry.hpp"

namespace abutcheck::detail {

struct Token {
  std::string text;
  int line = 0;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view text, std::string_view punct, char comment);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const;
  bool peek_is(std::string_view text, std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() && tokens_[pos_ + ahead].text == text;
  }
  const Token& next();
  const Token& expect(std::string_view text);
  bool accept(std::string_view text);
  /// Skips through the next ";" inclusive.
  void skip_statement();
  int line() const;

  [[noreturn]] void fail(const std::string& what) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& what) const {
    throw ParseError(what, t.line, t.column);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

long long parse_integer(const Token& t);
double parse_decimal(const Token& t);

/// Micron decimal → database units, rounded to nearest.
inline Coord to_dbu(double microns, int units_per_micron) {
  return static_cast<Coord>(std::llround(microns * units_per_micron));
}

/// Database units → shortest exact decimal micron string.
std::string format_microns(Coord value, int units_per_micron);

}  // namespace abutcheck::detail
