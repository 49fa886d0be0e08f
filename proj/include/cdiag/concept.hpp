// Programming concepts that every AST node maps onto.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cdiag/ast.hpp"

namespace cdiag {

enum class ConceptId {
  VariableDeclaration,
  InputRead,
  OutputWrite,
  IfCondition,
  LoopControl,
  ArrayIndex,
  BitwiseMask,
  AccumulatorUpdate,
  FileOpen,
  PatternScan,
};

inline constexpr int kConceptCount = 10;

inline constexpr std::array<ConceptId, kConceptCount> kAllConcepts = {
    ConceptId::VariableDeclaration, ConceptId::InputRead,   ConceptId::OutputWrite,
    ConceptId::IfCondition,         ConceptId::LoopControl, ConceptId::ArrayIndex,
    ConceptId::BitwiseMask,         ConceptId::AccumulatorUpdate, ConceptId::FileOpen,
    ConceptId::PatternScan};

std::string_view concept_name(ConceptId c);
std::optional<ConceptId> concept_from_name(std::string_view name);

/// Total mapping from a node to its concept. `parent` supplies context for
/// expression nodes and may be null.
///
/// Statements:
///   VarDecl -> variable-declaration; Scanf -> input-read; Printf -> output-write;
///   Fopen/Fclose -> file-open; While/For/Break -> loop-control;
///   If -> pattern-scan when its condition compares an array element with a
///         character literal, otherwise if-condition;
///   Assign/IncDec -> bitwise-mask (bitwise operator or bitwise compound
///         assignment), array-index (indexed target), accumulator-update
///         (increment, arithmetic compound, self-referencing update),
///         variable-declaration (literal initialization), else accumulator-update;
///   ExprStmt -> concept of its expression; Return/Block/Empty/Function/Program
///         -> loop-control (execution flow).
/// Expressions:
///   bitwise Binary/Unary `~` -> bitwise-mask; Index -> array-index;
///   relational/logical Binary, `!` -> if-condition; arithmetic -> accumulator-update;
///   Fscanf/AddrOf -> input-read; Call -> loop-control;
///   literals and VarRef -> variable-declaration.
ConceptId concept_of(const Node& node);

}  // namespace cdiag
