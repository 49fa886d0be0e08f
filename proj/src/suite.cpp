#include <omp.h>

#include "cdiag/interpreter.hpp"

namespace cdiag {

std::vector<ExecutionTrace> run_suite_serial(const Ast& ast, const std::vector<TestCase>& tests,
                                             const ExecOptions& opt) {
  std::vector<ExecutionTrace> out;
  out.reserve(tests.size());
  for (const auto& t : tests) out.push_back(execute(ast, t, opt));
  return out;
}

std::vector<ExecutionTrace> run_suite_parallel(const Ast& ast, const std::vector<TestCase>& tests,
                                               const ExecOptions& opt) {
  std::vector<ExecutionTrace> out(tests.size());
  const long n = static_cast<long>(tests.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) out[i] = execute(ast, tests[i], opt);
  return out;
}

}  // namespace cdiag
