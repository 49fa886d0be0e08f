#include "cdiag/corpus.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "cdiag/parser.hpp"

namespace cdiag {

namespace {

const Exercise& exercise_by_id(const std::vector<Exercise>& exercises, const std::string& id) {
  for (const auto& e : exercises)
    if (e.id == id) return e;
  throw std::invalid_argument("unknown exercise '" + id + "'");
}

MisconceptionCategory classify_entry(const CorpusEntry& e, const std::vector<Exercise>& exercises) {
  const Exercise& ex = exercise_by_id(exercises, e.exercise);
  DiagnoseOptions opt;
  opt.match.exec.record_steps = true;
  SubmissionReport rep = diagnose_submission(e.mutant.source, ex, empty_record("corpus"), opt);
  auto p = rep.primary();
  // An undetected fault has no category; score it as a miss.
  return p ? *p : MisconceptionCategory::StuckAtStart;
}

CorpusResult tally(const Corpus& corpus, std::vector<MisconceptionCategory> predicted) {
  CorpusResult r;
  r.predicted = std::move(predicted);
  for (size_t i = 0; i < corpus.entries.size(); ++i) {
    MutationCategory c = corpus.entries[i].mutant.category;
    auto& [ok, total] = r.per_category[c];
    ++total;
    if (r.predicted[i] == expected_category(c)) {
      ++ok;
      ++r.correct;
    }
  }
  return r;
}

}  // namespace

bool killed_by_tests(const Mutant& m, const Exercise& ex) {
  if (!m.parses) return true;
  ParseResult pr = parse(m.source);
  if (!pr.ok()) return true;
  ExecOptions opt;
  opt.record_steps = false;
  for (const auto& t : ex.tests) {
    ExecutionTrace a = execute(pr.ast, t, opt);
    ExecutionTrace b = execute(ex.reference, t, opt);
    if (a.stdout_text != b.stdout_text || a.outcome != b.outcome) return true;
  }
  return false;
}

MisconceptionCategory expected_category(MutationCategory c) {
  switch (c) {
    case MutationCategory::Recall: return MisconceptionCategory::IncorrectRecall;
    case MutationCategory::Extension: return MisconceptionCategory::IncorrectExtension;
    case MutationCategory::Modification: return MisconceptionCategory::IncorrectModification;
    case MutationCategory::Sequence: return MisconceptionCategory::IncorrectSequence;
  }
  return MisconceptionCategory::IncorrectRecall;
}

Corpus build_corpus(const std::vector<Exercise>& exercises, const CorpusOptions& opt) {
  Corpus corpus;
  std::map<MutationCategory, std::vector<CorpusEntry>> pool;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& ex : exercises) {
    for (const auto& op : mutation_operators()) {
      for (const auto& site : mutation_sites(ex.reference, op.id)) {
        Mutant m = apply_mutation(ex.reference, site);
        if (!seen.insert({ex.id, m.source}).second) continue;
        if (!killed_by_tests(m, ex)) continue;
        pool[m.category].push_back({ex.id, std::move(m)});
      }
    }
  }
  std::mt19937_64 rng(opt.seed);
  for (int ci = 0; ci < kMutationCategoryCount; ++ci) {
    auto c = static_cast<MutationCategory>(ci);
    auto& cands = pool[c];
    corpus.available[c] = static_cast<int>(cands.size());
    // Fisher-Yates with the shared generator keeps the draw reproducible
    // independently of the standard library's shuffle.
    for (size_t i = cands.size(); i > 1; --i) {
      std::uniform_int_distribution<size_t> pick(0, i - 1);
      std::swap(cands[i - 1], cands[pick(rng)]);
    }
    size_t take = std::min(cands.size(), static_cast<size_t>(std::max(0, opt.per_category)));
    for (size_t i = 0; i < take; ++i) corpus.entries.push_back(std::move(cands[i]));
  }
  return corpus;
}

double CorpusResult::accuracy() const {
  return predicted.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(predicted.size());
}

CorpusResult classify_corpus_serial(const Corpus& corpus, const std::vector<Exercise>& exercises) {
  std::vector<MisconceptionCategory> out;
  out.reserve(corpus.entries.size());
  for (const auto& e : corpus.entries) out.push_back(classify_entry(e, exercises));
  return tally(corpus, std::move(out));
}

CorpusResult classify_corpus_parallel(const Corpus& corpus, const std::vector<Exercise>& exercises) {
  std::vector<MisconceptionCategory> out(corpus.entries.size());
  long n = static_cast<long>(corpus.entries.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) out[i] = classify_entry(corpus.entries[i], exercises);
  return tally(corpus, std::move(out));
}

}  // namespace cdiag
