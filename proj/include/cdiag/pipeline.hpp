// One submission end to end: parse, locate mismatches, classify, plan.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdiag/classifier.hpp"
#include "cdiag/fixture.hpp"

namespace cdiag {

struct SubmissionReport {
  std::string exercise;
  std::string student_id;
  bool parsed = false;
  std::vector<ParseError> parse_errors;
  Ast student;
  std::optional<Diagnosis> diagnosis;
  std::vector<Classification> classifications;
  std::optional<ModificationPlan> plan;

  bool correct() const { return parsed && diagnosis && diagnosis->mismatches.empty(); }
  /// Category of the earliest-executed mismatch, if any.
  std::optional<MisconceptionCategory> primary() const;
};

struct DiagnoseOptions {
  ClassifierConfig classifier;
  MatchOptions match;
};

SubmissionReport diagnose_submission(const std::string& source, const Exercise& ex,
                                     const SlaRecord& sla, const DiagnoseOptions& opt = {});

}  // namespace cdiag
