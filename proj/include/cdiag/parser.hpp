// Lexer, parser and pretty printer for the C subset.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cdiag/ast.hpp"
#include "cdiag/concept.hpp"

namespace cdiag {

enum class ErrorKind { Lexical, Syntax, Semantic };

std::string_view error_kind_name(ErrorKind k);

struct ParseError {
  ErrorKind kind = ErrorKind::Syntax;
  SourceSpan span;
  std::string message;
  ConceptId hint = ConceptId::LoopControl;  // concept of the construct being parsed
};

struct ParseResult {
  Ast ast;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

/// Parse a translation unit. On failure `errors` is non-empty and `ast`
/// holds whatever was recovered (not guaranteed to satisfy the invariants).
ParseResult parse(std::string_view source, int file_id = 0);

/// Canonical source rendering. Render faults attached to nodes are honored,
/// which is how the mutation corpus produces non-parsing text.
std::string pretty_print(const Ast& ast);

/// Render a single statement or expression on one line (no trailing newline
/// for expressions). Used for diff labels and reports.
std::string render_statement_head(const Node& stmt);
std::string render_expression(const Node& expr);

}  // namespace cdiag
