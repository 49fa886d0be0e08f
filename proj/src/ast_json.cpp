#include "cdiag/ast_json.hpp"

namespace cdiag {

using nlohmann::json;

json to_json(const SourceSpan& s) {
  return {{"file", s.file_id},
          {"start_line", s.start_line},
          {"start_col", s.start_col},
          {"end_line", s.end_line},
          {"end_col", s.end_col}};
}

json to_json(const Node& n) {
  json j = {{"kind", kind_name(n.kind)}, {"id", n.id}, {"span", to_json(n.span)}};
  if (!n.text.empty()) j["text"] = n.text;
  if (!n.aux.empty()) j["aux"] = n.aux;
  if (n.kind == NodeKind::VarDecl || n.kind == NodeKind::Function) j["type"] = type_name(n.type);
  if (n.kind == NodeKind::IntLit || n.kind == NodeKind::CharLit) j["value"] = n.int_value;
  if (n.kind == NodeKind::FloatLit) j["value"] = n.float_value;
  if (n.kind == NodeKind::IncDec) j["prefix"] = n.prefix;
  if (n.kind != NodeKind::Program) j["concept"] = std::string(concept_name(concept_of(n)));
  json kids = json::array();
  for (const auto& c : n.children) kids.push_back(to_json(c));
  j["children"] = std::move(kids);
  return j;
}

json to_json(const ParseError& e) {
  return {{"kind", std::string(error_kind_name(e.kind))},
          {"span", to_json(e.span)},
          {"message", e.message},
          {"concept", std::string(concept_name(e.hint))}};
}

json parse_result_json(const ParseResult& r) {
  json errs = json::array();
  for (const auto& e : r.errors) errs.push_back(to_json(e));
  json j = {{"ok", r.ok()}, {"errors", errs}};
  if (r.ok()) j["ast"] = to_json(r.ast.root);
  return j;
}

}  // namespace cdiag
