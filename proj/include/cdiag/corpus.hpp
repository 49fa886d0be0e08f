// Labeled single-fault mutant corpus over the shipped fixtures.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cdiag/fixture.hpp"
#include "cdiag/mutate.hpp"
#include "cdiag/pipeline.hpp"

namespace cdiag {

struct CorpusEntry {
  std::string exercise;  // Exercise::id
  Mutant mutant;
};

struct CorpusOptions {
  int per_category = 50;
  std::uint64_t seed = 1;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::map<MutationCategory, int> available;  // killed, distinct candidates per category
};

/// Candidates every operator yields on every exercise, deduplicated by text,
/// minus mutants the exercise tests cannot tell from the reference; then a
/// seeded draw of `per_category` per category (all of them when fewer exist).
Corpus build_corpus(const std::vector<Exercise>& exercises, const CorpusOptions& opt = {});

/// Whether the exercise tests distinguish the mutant from the reference.
bool killed_by_tests(const Mutant& m, const Exercise& ex);

/// The category a classification must report for a seeded label.
MisconceptionCategory expected_category(MutationCategory c);

struct CorpusResult {
  std::vector<MisconceptionCategory> predicted;  // per entry; primary category
  int correct = 0;
  std::map<MutationCategory, std::pair<int, int>> per_category;  // correct, total
  double accuracy() const;
};

/// Classify every entry against an empty student model. The parallel variant
/// distributes entries over OpenMP threads and returns identical results.
CorpusResult classify_corpus_serial(const Corpus& corpus, const std::vector<Exercise>& exercises);
CorpusResult classify_corpus_parallel(const Corpus& corpus, const std::vector<Exercise>& exercises);

}  // namespace cdiag
