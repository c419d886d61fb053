// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "lexer.hpp"

#include <cctype>

#include "nbtrace/syntax.hpp"

namespace nbtrace::syntax::detail {

namespace {

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

constexpr std::string_view kMultiCharOps[] = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
};

constexpr std::string_view kSingleCharOps = "+-*/%@&|^~<>()[]{},:.;=";

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_) {
        if (handle_indentation()) continue;
      }
      lex_one();
    }
    if (depth_ > 0) fail(line_, col(), "unexpected EOF inside brackets");
    if (!tokens_.empty() && tokens_.back().type != TokenType::Newline &&
        tokens_.back().type != TokenType::Dedent) {
      push(TokenType::Newline, "", line_, col(), line_, col());
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenType::Dedent, "", line_, 0, line_, 0);
    }
    push(TokenType::EndMarker, "", line_, col(), line_, col());
    return std::move(tokens_);
  }

 private:
  [[noreturn]] void fail(int line, int column, const std::string& message) {
    throw SyntaxError(line, column, message);
  }

  int col() const { return static_cast<int>(pos_ - line_begin_); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void push(TokenType type, std::string text, int line, int c, int end_line, int end_col) {
    tokens_.push_back(Token{type, std::move(text), line, c, end_line, end_col});
  }

  void newline_advance() {
    // Consumes one of "\n", "\r\n", "\r".
    if (peek() == '\r' && peek(1) == '\n') ++pos_;
    ++pos_;
    ++line_;
    line_begin_ = pos_;
  }

  // Returns true when the whole line was blank or a comment and got consumed.
  bool handle_indentation() {
    at_line_start_ = false;
    int width = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
      if (src_[p] == ' ') {
        ++width;
      } else if (src_[p] == '\t') {
        width = (width / 8 + 1) * 8;
      } else {
        width = 0;
      }
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return true;
    }
    char c = src_[p];
    if (c == '#' || c == '\n' || c == '\r') {
      pos_ = p;
      while (pos_ < src_.size() && peek() != '\n' && peek() != '\r') ++pos_;
      if (pos_ < src_.size()) newline_advance();
      at_line_start_ = true;
      return true;
    }
    pos_ = p;
    int line = line_;
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(TokenType::Indent, "", line, 0, line, width);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(TokenType::Dedent, "", line, 0, line, width);
      }
      if (width != indents_.back()) fail(line, width, "unindent does not match any outer indentation level");
    }
    return false;
  }

  void lex_one() {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '#') {
      while (pos_ < src_.size() && peek() != '\n' && peek() != '\r') ++pos_;
      return;
    }
    if (c == '\\') {
      if (peek(1) == '\n' || peek(1) == '\r') {
        ++pos_;
        newline_advance();
        return;
      }
      if (peek(1) == '\0') fail(line_, col(), "unexpected EOF after line continuation");
      fail(line_, col(), "unexpected character after line continuation character");
    }
    if (c == '\n' || c == '\r') {
      int line = line_;
      int column = col();
      newline_advance();
      if (depth_ == 0) {
        if (!tokens_.empty() && tokens_.back().type != TokenType::Newline &&
            tokens_.back().type != TokenType::Indent && tokens_.back().type != TokenType::Dedent) {
          push(TokenType::Newline, "\n", line, column, line, column + 1);
        }
        at_line_start_ = true;
      }
      return;
    }
    if (is_string_start()) {
      lex_string();
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      lex_number();
      return;
    }
    if (is_ident_start(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      int column = col();
      while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(peek()))) ++pos_;
      push(TokenType::Name, std::string(src_.substr(start, pos_ - start)), line_, column, line_, col());
      return;
    }
    lex_operator();
  }

  bool is_string_start() const {
    std::size_t p = pos_;
    std::size_t prefix = 0;
    while (prefix < 2 && p + prefix < src_.size()) {
      char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[p + prefix])));
      if (ch == 'r' || ch == 'b' || ch == 'u' || ch == 'f') {
        ++prefix;
      } else {
        break;
      }
    }
    if (p + prefix >= src_.size()) return false;
    char q = src_[p + prefix];
    if (q != '\'' && q != '"') return false;
    if (prefix == 0) return true;
    std::string pre;
    for (std::size_t i = 0; i < prefix; ++i) {
      pre += static_cast<char>(std::tolower(static_cast<unsigned char>(src_[p + i])));
    }
    return pre == "r" || pre == "b" || pre == "u" || pre == "f" || pre == "br" ||
           pre == "rb" || pre == "fr" || pre == "rf";
  }

  void lex_string() {
    std::size_t start = pos_;
    int line = line_;
    int column = col();
    while (peek() != '\'' && peek() != '"') ++pos_;
    char quote = peek();
    bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;
    for (;;) {
      if (pos_ >= src_.size()) {
        fail(line, column, triple ? "unterminated triple-quoted string literal"
                                  : "unterminated string literal");
      }
      char ch = peek();
      if (ch == '\\') {
        // Even in raw strings a backslash keeps the following quote literal.
        ++pos_;
        if (pos_ >= src_.size()) continue;
        if (peek() == '\n' || peek() == '\r') {
          newline_advance();
        } else {
          ++pos_;
        }
        continue;
      }
      if (ch == '\n' || ch == '\r') {
        if (!triple) fail(line, column, "unterminated string literal");
        newline_advance();
        continue;
      }
      if (ch == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    push(TokenType::String, std::string(src_.substr(start, pos_ - start)), line, column, line_, col());
  }

  void lex_number() {
    std::size_t start = pos_;
    int column = col();
    auto digits = [&](auto pred) {
      while (pos_ < src_.size() && (pred(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    };
    auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
    if (peek() == '0' && std::string_view("xXoObB").find(peek(1)) != std::string_view::npos && peek(1) != '\0') {
      pos_ += 2;
      digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
    } else {
      digits(is_dec);
      if (peek() == '.') {
        ++pos_;
        digits(is_dec);
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t save = pos_;
        ++pos_;
        if (peek() == '+' || peek() == '-') ++pos_;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
          digits(is_dec);
        } else {
          pos_ = save;
        }
      }
      if (peek() == 'j' || peek() == 'J') ++pos_;
    }
    if (is_ident_char(static_cast<unsigned char>(peek()))) {
      fail(line_, col(), "invalid decimal literal");
    }
    std::string_view text = src_.substr(start, pos_ - start);
    if (text.size() > 1 && text[0] == '0' && text.find_first_not_of("0_") != std::string_view::npos &&
        text.find_first_not_of("0123456789_") == std::string_view::npos) {
      fail(line_, column, "leading zeros in decimal integer literals are not permitted");
    }
    push(TokenType::Number, std::string(src_.substr(start, pos_ - start)), line_, column, line_, col());
  }

  void lex_operator() {
    int column = col();
    for (std::string_view op : kMultiCharOps) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        push(TokenType::Op, std::string(op), line_, column, line_, col());
        return;
      }
    }
    char c = peek();
    if (kSingleCharOps.find(c) == std::string_view::npos) {
      fail(line_, column, std::string("invalid character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) fail(line_, column, std::string("unmatched '") + c + "'");
      --depth_;
    }
    ++pos_;
    push(TokenType::Op, std::string(1, c), line_, column, line_, col());
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_begin_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace nbtrace::syntax::detail
