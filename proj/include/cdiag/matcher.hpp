// Variable mapping, statement-level differencing and mismatch location.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdiag/concept.hpp"
#include "cdiag/interpreter.hpp"
#include "cdiag/parser.hpp"

namespace cdiag {

// ---- variable mapping -------------------------------------------------------

struct VariablePair {
  std::string student;    // variable key in the student program
  std::string reference;  // variable key in the reference program
  double score = 0.0;     // similarity in [0, 1]
};

struct VariableMapping {
  std::vector<VariablePair> pairs;
  std::vector<std::string> unmatched_student;
  std::vector<std::string> unmatched_reference;

  std::optional<std::string> reference_for(const std::string& student) const;
  std::optional<std::string> student_for(const std::string& reference) const;
};

struct SimilarityWeights {
  double type = 0.4;
  double usage = 0.3;
  double trace = 0.3;
  double threshold = 0.35;  // pairs scoring below stay unmatched
};

/// Per-component similarity of two variables, each in [0, 1].
struct VariableSimilarity {
  double type = 0.0, usage = 0.0, trace = 0.0;
  double blended(const SimilarityWeights& w) const {
    return w.type * type + w.usage * usage + w.trace * trace;
  }
};

/// Optimal injective mapping maximizing summed similarity (exact assignment).
/// `traces_s[i]` and `traces_r[i]` must come from the same test.
VariableMapping map_variables(const Ast& student, const Ast& reference,
                              const std::vector<ExecutionTrace>& traces_s,
                              const std::vector<ExecutionTrace>& traces_r,
                              const SimilarityWeights& w = {});

/// Similarity matrix (student rows x reference columns) behind map_variables.
std::vector<std::vector<VariableSimilarity>> similarity_matrix(
    const Ast& student, const Ast& reference, const std::vector<ExecutionTrace>& traces_s,
    const std::vector<ExecutionTrace>& traces_r);

/// Pairs variables with equal keys; used when no renaming is expected.
VariableMapping identity_mapping(const Ast& student, const Ast& reference);

/// Copy of `student` with variables renamed to their mapped reference names.
/// Unmatched student variables get a `?` prefix so they never alias.
Ast rename_through(const Ast& student, const VariableMapping& mapping);

// ---- structural differencing ------------------------------------------------

enum class EditKind { Insert, Delete, Update, Move };

const char* edit_kind_name(EditKind k);

/// One statement-level edit turning the reference into the student program.
/// Delete: reference statement absent from the student; Insert: extra student
/// statement; Update: same place, different text; Move: equal subtree at a
/// different position (`reorder` when it stays under the same parent).
struct Edit {
  EditKind kind = EditKind::Update;
  int student_id = -1;
  int reference_id = -1;
  SourceSpan student_span;
  SourceSpan reference_span;
  std::string student_label;
  std::string reference_label;
  int size = 1;  // statement-tree nodes in the edited subtree
  bool reorder = false;
  ConceptId concept_id = ConceptId::LoopControl;
};

/// Minimum-cost statement-level edit script (Zhang-Shasha, unit costs) after
/// renaming student variables through `mapping`, with move detection.
std::vector<Edit> diff_programs(const Ast& student, const Ast& reference,
                                const VariableMapping& mapping);

/// Raw Zhang-Shasha distance between the statement trees (unit costs).
int tree_edit_distance(const Ast& a, const Ast& b);

// ---- responses ---------------------------------------------------------------

enum class OutcomeCode { Match, StdoutMismatch, ValueMismatch, Crash, StepLimit, MissingOutput };

const char* outcome_code_name(OutcomeCode c);

struct ResponseVector {
  std::vector<OutcomeCode> codes;
  std::vector<double> divergence;  // per-test trace divergence, >= 0

  size_t size() const { return codes.size(); }
  bool all_match() const;
  friend bool operator==(const ResponseVector&, const ResponseVector&) = default;
};

/// The response of a correct program on `n` tests.
ResponseVector all_match_response(size_t n);

/// (number of differing codes + sum of t/(1+t) over divergence gaps) / n.
/// A metric on equal-length vectors; throws std::invalid_argument otherwise.
double response_distance(const ResponseVector& a, const ResponseVector& b);

/// Compare paired runs test by test.
ResponseVector compare_runs(const std::vector<ExecutionTrace>& student,
                            const std::vector<ExecutionTrace>& reference,
                            const VariableMapping& mapping);

/// Earliest-divergence-weighted difference of mapped variable histories.
double trace_divergence(const ExecutionTrace& student, const ExecutionTrace& reference,
                        const VariableMapping& mapping);

// ---- mismatches --------------------------------------------------------------

enum class MismatchKind { StructuralDiff, ValueDivergence, OutcomeDivergence };

const char* mismatch_kind_name(MismatchKind k);

struct Mismatch {
  int id = 0;
  std::optional<SourceSpan> student_span;
  std::optional<SourceSpan> reference_span;
  MismatchKind kind = MismatchKind::StructuralDiff;
  std::string first_divergent_test;  // empty when no test diverges
  double divergence_score = 0.0;
  int execution_order = 0;
  Edit edit;
  long first_step = -1;  // step index at which the edited code first runs
};

struct MatchOptions {
  ExecOptions exec;
  SimilarityWeights weights;
  bool parallel = false;
};

struct Diagnosis {
  VariableMapping mapping;
  std::vector<Edit> edits;
  std::vector<Mismatch> mismatches;
  ResponseVector response;
  std::vector<ExecutionTrace> student_traces;
  std::vector<ExecutionTrace> reference_traces;
};

/// Run both programs on `tests`, map variables, diff, and order the
/// mismatches by (first execution, edited subtree size).
Diagnosis locate_mismatches(const Ast& student, const Ast& reference,
                            const std::vector<TestCase>& tests, const MatchOptions& opt = {});

}  // namespace cdiag
