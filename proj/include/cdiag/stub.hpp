// Extraction of a statement fragment into a standalone runnable stub.
#pragma once

#include <stdexcept>

#include "cdiag/interpreter.hpp"

namespace cdiag {

struct FragmentNotExtractable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Stub {
  Ast program;  // the fragment executes in the context of its own program
  int first_id = -1;
  int last_id = -1;
  SourceSpan fragment_span;
  Harness harness;
  std::vector<TestCase> probes;
  int seed_step = -1;  // index in the seeding trace of the fragment's first step
};

/// The run of sibling statements whose combined span is exactly `span`.
/// Throws FragmentNotExtractable when the span splits a statement.
std::pair<int, int> find_fragment(const Ast& ast, const SourceSpan& span);

/// Harness from the snapshot immediately preceding the fragment's first
/// execution in `seed`; `seed_step` receives the index of that first step.
/// Throws FragmentNotExtractable if the fragment never ran.
Harness harness_before(const ExecutionTrace& seed, int first_id, int end_id, int* seed_step);

/// State and I/O position just before recorded step `step` of `seed`.
Harness harness_at(const ExecutionTrace& seed, int step);

/// Indices of the recorded steps at which control enters [first_id, end_id).
std::vector<int> fragment_entries(const ExecutionTrace& seed, int first_id, int end_id);

Stub make_stub(const Ast& ast, const SourceSpan& fragment_span, const ExecutionTrace& seed,
               std::vector<TestCase> probes = {});

/// Stub over explicit statement ids with a caller-built harness.
Stub make_stub(const Ast& ast, int first_id, int last_id, Harness harness,
               std::vector<TestCase> probes = {});

ExecutionTrace execute_stub(const Stub& stub, const TestCase& probe, const ExecOptions& opt = {});

}  // namespace cdiag
