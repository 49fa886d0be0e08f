// JSON views of parser types.
#pragma once

#include <json.hpp>

#include "cdiag/parser.hpp"

namespace cdiag {

nlohmann::json to_json(const SourceSpan& span);
nlohmann::json to_json(const Node& node);
nlohmann::json to_json(const ParseError& err);

/// `{"ok": bool, "ast": ..., "errors": [...]}` as emitted by `parse --dump-ast`.
nlohmann::json parse_result_json(const ParseResult& r);

}  // namespace cdiag
