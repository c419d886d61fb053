// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nbtrace::syntax::detail {

enum class TokenType {
  Name,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  EndMarker,
};

struct Token {
  TokenType type;
  std::string text;
  int line;
  int col;
  int end_line;
  int end_col;
};

// Splits Python 3 source into tokens with INDENT/DEDENT bookkeeping.
// Throws SyntaxError for unterminated literals, bad dedents and characters
// outside the language.
std::vector<Token> tokenize(std::string_view source);

}  // namespace nbtrace::syntax::detail
