#include "cdiag/concept.hpp"

namespace cdiag {

namespace {

constexpr std::array<std::string_view, kConceptCount> kNames = {
    "variable-declaration", "input-read",  "output-write",       "if-condition",
    "loop-control",         "array-index", "bitwise-mask",       "accumulator-update",
    "file-open",            "pattern-scan"};

bool is_bitwise_op(const std::string& op) {
  return op == "&" || op == "|" || op == "^" || op == "<<" || op == ">>" || op == "~";
}

bool is_relational_op(const std::string& op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" ||
         op == "&&" || op == "||" || op == "!";
}

bool contains_bitwise(const Node& n) {
  if ((n.kind == NodeKind::Binary || n.kind == NodeKind::Unary) && is_bitwise_op(n.text))
    return true;
  for (const auto& c : n.children)
    if (contains_bitwise(c)) return true;
  return false;
}

bool refers_to(const Node& n, const std::string& name) {
  if (n.kind == NodeKind::VarRef && n.text == name) return true;
  for (const auto& c : n.children)
    if (refers_to(c, name)) return true;
  return false;
}

// Condition compares an indexed element against a character literal.
bool compares_indexed_char(const Node& n) {
  if (n.kind == NodeKind::Binary && (n.text == "==" || n.text == "!=") && n.children.size() == 2) {
    const auto& a = n.children[0];
    const auto& b = n.children[1];
    if ((a.kind == NodeKind::Index && b.kind == NodeKind::CharLit) ||
        (b.kind == NodeKind::Index && a.kind == NodeKind::CharLit))
      return true;
  }
  for (const auto& c : n.children)
    if (compares_indexed_char(c)) return true;
  return false;
}

ConceptId assignment_concept(const Node& n) {
  const std::string& op = n.text;
  if (n.kind == NodeKind::IncDec) return ConceptId::AccumulatorUpdate;
  if (op == "&=" || op == "|=" || op == "^=" || op == "<<=" || op == ">>=")
    return ConceptId::BitwiseMask;
  const Node& target = n.children[0];
  const Node& value = n.children[1];
  if (contains_bitwise(value)) return ConceptId::BitwiseMask;
  if (target.kind == NodeKind::Index) return ConceptId::ArrayIndex;
  if (op != "=") return ConceptId::AccumulatorUpdate;
  if (target.kind == NodeKind::VarRef && refers_to(value, target.text))
    return ConceptId::AccumulatorUpdate;
  bool literal = value.kind == NodeKind::IntLit || value.kind == NodeKind::CharLit ||
                 value.kind == NodeKind::FloatLit ||
                 (value.kind == NodeKind::Unary && value.text == "-" &&
                  value.children[0].kind == NodeKind::IntLit);
  if (literal) return ConceptId::VariableDeclaration;
  return ConceptId::AccumulatorUpdate;
}

}  // namespace

std::string_view concept_name(ConceptId c) { return kNames[static_cast<int>(c)]; }

std::optional<ConceptId> concept_from_name(std::string_view name) {
  for (int i = 0; i < kConceptCount; ++i)
    if (kNames[i] == name) return static_cast<ConceptId>(i);
  return std::nullopt;
}

ConceptId concept_of(const Node& n) {
  switch (n.kind) {
    case NodeKind::VarDecl: return ConceptId::VariableDeclaration;
    case NodeKind::Scanf: return ConceptId::InputRead;
    case NodeKind::Printf: return ConceptId::OutputWrite;
    case NodeKind::Fopen:
    case NodeKind::Fclose: return ConceptId::FileOpen;
    case NodeKind::While:
    case NodeKind::For:
    case NodeKind::Break: return ConceptId::LoopControl;
    case NodeKind::If:
      return compares_indexed_char(n.children[0]) ? ConceptId::PatternScan
                                                  : ConceptId::IfCondition;
    case NodeKind::Assign:
    case NodeKind::IncDec: return assignment_concept(n);
    case NodeKind::ExprStmt:
      return n.children.empty() ? ConceptId::LoopControl : concept_of(n.children[0]);
    case NodeKind::Return:
    case NodeKind::Block:
    case NodeKind::Empty:
    case NodeKind::Function:
    case NodeKind::Program: return ConceptId::LoopControl;
    case NodeKind::Binary:
      if (is_bitwise_op(n.text)) return ConceptId::BitwiseMask;
      if (is_relational_op(n.text)) return ConceptId::IfCondition;
      return ConceptId::AccumulatorUpdate;
    case NodeKind::Unary:
      if (n.text == "~") return ConceptId::BitwiseMask;
      if (n.text == "!") return ConceptId::IfCondition;
      return ConceptId::AccumulatorUpdate;
    case NodeKind::Index: return ConceptId::ArrayIndex;
    case NodeKind::Fscanf:
    case NodeKind::AddrOf: return ConceptId::InputRead;
    case NodeKind::Call: return ConceptId::LoopControl;
    case NodeKind::IntLit:
    case NodeKind::CharLit:
    case NodeKind::FloatLit:
    case NodeKind::VarRef: return ConceptId::VariableDeclaration;
  }
  return ConceptId::LoopControl;
}

}  // namespace cdiag
