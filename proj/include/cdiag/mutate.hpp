// Labeled fault seeding: every operator carries its misconception category.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdiag/ast.hpp"
#include "cdiag/concept.hpp"

namespace cdiag {

enum class MutationCategory { Recall, Extension, Modification, Sequence };

inline constexpr int kMutationCategoryCount = 4;

const char* mutation_category_name(MutationCategory c);
std::optional<MutationCategory> mutation_category_from_name(std::string_view s);

struct OperatorInfo {
  std::string id;
  MutationCategory category;
  bool breaks_parse;  // emits labeled non-parsing text
};

/// All operators in a fixed order.
const std::vector<OperatorInfo>& mutation_operators();
const OperatorInfo* find_operator(const std::string& id);

struct OperatorNotApplicable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MutationSite {
  std::string op;
  int node_id = -1;   // node in the reference the operator rewrites
  int variant = 0;    // operator-specific choice at that node
  ConceptId concept_id = ConceptId::LoopControl;
  std::string description;
};

struct MutationSpec {
  MutationCategory category = MutationCategory::Recall;
  std::string op;                         // empty: any operator of the category
  std::optional<ConceptId> target;        // restrict to sites of this concept
  std::uint64_t seed = 0;
};

struct Mutant {
  std::string op;
  MutationCategory category = MutationCategory::Recall;
  ConceptId concept_id = ConceptId::LoopControl;
  MutationSite site;
  std::string source;  // pretty-printed mutant text
  bool parses = true;
};

/// Every place `op` applies in `reference` (numbered), in preorder.
std::vector<MutationSite> mutation_sites(const Ast& reference, const std::string& op);

/// Sites of every operator of a category.
std::vector<MutationSite> category_sites(const Ast& reference, MutationCategory c);

/// Apply one site. Throws OperatorNotApplicable if the site does not match.
Mutant apply_mutation(const Ast& reference, const MutationSite& site);

/// Seeded choice among the matching sites; deterministic per seed.
Mutant mutate(const Ast& reference, const MutationSpec& spec);

/// Mutated tree for operators that keep the program parseable; the render
/// faults of parse-breaking operators are kept as node flags.
Ast mutated_ast(const Ast& reference, const MutationSite& site);

struct RenameResult {
  Ast ast;
  std::string source;
  std::map<std::string, std::string> student_to_reference;  // variable keys
};

/// Rename `count` distinct variables to fresh names (seeded).
RenameResult rename_variables(const Ast& reference, int count, std::uint64_t seed);

}  // namespace cdiag
