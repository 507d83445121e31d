#include "tokenizer.hpp"

#include <cctype>
#include <cstdio>

namespace abutcheck::detail {

std::vector<Token> tokenize(std::string_view text, std::string_view punct, char comment) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++column;
      ++i;
      continue;
    }
    if (comment != '\0' && c == comment) {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (punct.find(c) != std::string_view::npos) {
      out.push_back({std::string(1, c), line, column});
      ++column;
      ++i;
      continue;
    }
    const int start_col = column;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
           punct.find(text[j]) == std::string_view::npos && !(comment != '\0' && text[j] == comment)) {
      ++j;
    }
    out.push_back({std::string(text.substr(i, j - i)), line, start_col});
    column += static_cast<int>(j - i);
    i = j;
  }
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  if (pos_ + ahead >= tokens_.size()) fail("unexpected end of input");
  return tokens_[pos_ + ahead];
}

const Token& TokenStream::next() {
  if (done()) fail("unexpected end of input");
  return tokens_[pos_++];
}

const Token& TokenStream::expect(std::string_view text) {
  const Token& t = next();
  if (t.text != text) fail_at(t, "expected '" + std::string(text) + "', found '" + t.text + "'");
  return t;
}

bool TokenStream::accept(std::string_view text) {
  if (peek_is(text)) {
    ++pos_;
    return true;
  }
  return false;
}

void TokenStream::skip_statement() {
  while (next().text != ";") {
  }
}

int TokenStream::line() const {
  if (tokens_.empty()) return 0;
  return pos_ < tokens_.size() ? tokens_[pos_].line : tokens_.back().line;
}

void TokenStream::fail(const std::string& what) const {
  if (!done()) fail_at(tokens_[pos_], what);
  throw ParseError(what, line());
}

long long parse_integer(const Token& t) {
  long long v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) throw ParseError("expected integer, found '" + t.text + "'", t.line, t.column);
  return v;
}

double parse_decimal(const Token& t) {
  double v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !std::isfinite(v)) {
    throw ParseError("expected number, found '" + t.text + "'", t.line, t.column);
  }
  return v;
}

std::string format_microns(Coord value, int units_per_micron) {
  int digits = 0;
  for (long long u = units_per_micron; u > 1 && u % 10 == 0; u /= 10) ++digits;
  long long pow10 = 1;
  for (int i = 0; i < digits; ++i) pow10 *= 10;
  if (pow10 != units_per_micron) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(value) / units_per_micron);
    return buf;
  }
  const bool neg = value < 0;
  const unsigned long long mag = neg ? static_cast<unsigned long long>(-value) : static_cast<unsigned long long>(value);
  std::string out = (neg ? "-" : "") + std::to_string(mag / pow10);
  unsigned long long frac = mag % pow10;
  if (frac != 0) {
    std::string f = std::to_string(frac);
    f.insert(0, digits - f.size(), '0');
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  return out;
}

}  // namespace abutcheck::detail
