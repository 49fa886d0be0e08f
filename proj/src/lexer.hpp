// Tokenizer for the C subset (internal).
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cdiag/parser.hpp"

namespace cdiag::detail {

enum class Tok {
  Ident,
  Keyword,
  IntLit,
  FloatLit,
  CharLit,
  StringLit,
  Punct,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;      // spelling; decoded payload for char/string literals
  std::string spelling;  // original spelling including quotes
  std::int64_t int_value = 0;
  double float_value = 0.0;
  SourceSpan span;
};

/// Tokenize; lexical errors are appended to `errors` and the offending
/// character is skipped.
std::vector<Token> tokenize(std::string_view src, int file_id, std::vector<ParseError>& errors);

/// Escape a decoded character/string payload back to C source spelling.
std::string escape_c(std::string_view payload, char quote);

}  // namespace cdiag::detail
