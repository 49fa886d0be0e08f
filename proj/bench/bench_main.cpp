// Serial reference kernels against their OpenMP variants on the shipped
// fixtures. Each pair must also agree on its result.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "cdiag/corpus.hpp"
#include "cdiag/fixture.hpp"
#include "cdiag/interpreter.hpp"
#include "cdiag/matcher.hpp"
#include "cdiag/mutate.hpp"
#include "cdiag/parser.hpp"

using namespace cdiag;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool agree) {
  std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              agree ? "same" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::vector<Exercise> exercises = {load_exercise(shipped_fixtures_dir() + "/pap_counter"),
                                     load_exercise(shipped_fixtures_dir() + "/bitmask")};
  std::printf("threads %d, best of %d\n", omp_get_max_threads(), reps);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "openmp s", "speedup");
  bool all = true;

  for (const auto& ex : exercises) {
    std::vector<ExecutionTrace> a, b;
    double s = best_of(reps, [&] { a = run_suite_serial(ex.reference, ex.tests); });
    double p = best_of(reps, [&] { b = run_suite_parallel(ex.reference, ex.tests); });
    bool same = a.size() == b.size();
    for (size_t i = 0; same && i < a.size(); ++i)
      same = a[i].stdout_text == b[i].stdout_text && a[i].step_count == b[i].step_count;
    all = all && same;
    row(("run_suite " + ex.id).c_str(), s, p, same);
  }

  for (const auto& ex : exercises) {
    Mutant m = mutate(ex.reference, {MutationCategory::Modification, "", std::nullopt, 3});
    ParseResult pr = parse(m.source);
    if (!pr.ok()) continue;
    MatchOptions serial, parallel;
    parallel.parallel = true;
    Diagnosis a, b;
    double s = best_of(reps, [&] { a = locate_mismatches(pr.ast, ex.reference, ex.tests, serial); });
    double p = best_of(reps, [&] { b = locate_mismatches(pr.ast, ex.reference, ex.tests, parallel); });
    bool same = a.response == b.response && a.mismatches.size() == b.mismatches.size();
    all = all && same;
    row(("locate_mismatches " + ex.id).c_str(), s, p, same);
  }

  Corpus corpus = build_corpus(exercises, {20, 1});
  CorpusResult a, b;
  double s = best_of(1, [&] { a = classify_corpus_serial(corpus, exercises); });
  double p = best_of(1, [&] { b = classify_corpus_parallel(corpus, exercises); });
  bool same = a.predicted == b.predicted;
  all = all && same;
  row("classify_corpus (80)", s, p, same);
  return all ? 0 : 1;
}
