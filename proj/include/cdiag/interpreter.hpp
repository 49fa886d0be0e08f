// Deterministic tree-walking interpreter with per-statement value traces.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdiag/ast.hpp"

namespace cdiag {

struct TestCase {
  std::string id;
  std::vector<std::string> stdin_tokens;            // joined with '\n' to form stdin
  std::map<std::string, std::string> input_files;   // name -> contents
  std::optional<std::string> expected_stdout;
};

enum class Outcome { Completed, StepLimitExceeded, RuntimeError };

enum class RuntimeErrorKind {
  None,
  DivisionByZero,
  ArrayOutOfBounds,
  ReadPastInput,
  FormatMismatch,
  UninitializedRead,
  InvalidFile,
};

const char* outcome_name(Outcome o);
const char* runtime_error_name(RuntimeErrorKind k);

/// Values of one variable at a step. Scalars have one element. NaN marks an
/// uninitialized element.
struct VarSnapshot {
  int var = -1;  // index into ExecutionTrace::variables
  std::vector<double> values;

  friend bool operator==(const VarSnapshot&, const VarSnapshot&) = default;
};

struct FileCursor {
  std::string name;
  std::string mode;
  std::size_t pos = 0;
  bool open = false;

  friend bool operator==(const FileCursor&, const FileCursor&) = default;
};

/// Input positions; file handles are 1-based indices into `files`.
struct IoState {
  std::size_t stdin_pos = 0;
  std::vector<FileCursor> files;

  friend bool operator==(const IoState&, const IoState&) = default;
};

struct TraceStep {
  int node_id = -1;
  SourceSpan span;
  std::vector<VarSnapshot> vars;  // globals, then live locals of the current frame
  IoState io;
};

struct ExecutionTrace {
  std::string test_id;
  std::vector<VariableInfo> variables;
  std::vector<TraceStep> steps;     // at most ExecOptions::max_recorded_steps
  long step_count = 0;              // all steps executed, recorded or not
  bool truncated = false;
  std::string stdout_text;
  Outcome outcome = Outcome::Completed;
  RuntimeErrorKind error = RuntimeErrorKind::None;
  SourceSpan error_span;
  std::string error_message;
  int exit_code = 0;
  std::vector<VarSnapshot> final_vars;  // state when execution stopped

  /// Final value of a scalar variable by name (first match), if recorded.
  std::optional<double> final_value(const std::string& name) const;
};

struct ExecOptions {
  long step_limit = 100000;
  long max_recorded_steps = 20000;
  bool record_steps = true;
};

/// Values a stub starts from: variable key -> element values (NaN = uninit).
struct Harness {
  std::map<std::string, std::vector<double>> values;
  IoState io;
};

/// Run `main` of a valid program on one test.
ExecutionTrace execute(const Ast& ast, const TestCase& test, const ExecOptions& opt = {});

/// Run a contiguous run of sibling statements `[first, last]` (preorder ids)
/// inside their enclosing function, starting from `harness` instead of the
/// program's initial state.
ExecutionTrace execute_fragment(const Ast& ast, int first_id, int last_id, const Harness& harness,
                                const TestCase& test, const ExecOptions& opt = {});

/// Trace equality with the absolute float tolerance used for comparisons.
bool values_equal(double a, double b);

/// Run every test; serial reference and OpenMP variant give identical results.
std::vector<ExecutionTrace> run_suite_serial(const Ast& ast, const std::vector<TestCase>& tests,
                                             const ExecOptions& opt = {});
std::vector<ExecutionTrace> run_suite_parallel(const Ast& ast, const std::vector<TestCase>& tests,
                                               const ExecOptions& opt = {});

/// Compose stdin text from tokens.
std::string stdin_text(const TestCase& t);

}  // namespace cdiag
