#include "cdiag/pipeline.hpp"

namespace cdiag {

std::optional<MisconceptionCategory> SubmissionReport::primary() const {
  if (classifications.empty()) return std::nullopt;
  return classifications.front().category;
}

SubmissionReport diagnose_submission(const std::string& source, const Exercise& ex,
                                     const SlaRecord& sla, const DiagnoseOptions& opt) {
  SubmissionReport rep;
  rep.exercise = ex.id;
  rep.student_id = sla.student_id;
  ParseResult pr = parse(source);
  rep.parse_errors = pr.errors;
  if (!pr.ok()) {
    rep.classifications.push_back(classify_parse_failure(pr.errors, source, sla, opt.classifier));
    return rep;
  }
  rep.parsed = true;
  rep.student = std::move(pr.ast);
  rep.diagnosis = locate_mismatches(rep.student, ex.reference, ex.tests, opt.match);

  ClassifyContext ctx;
  ctx.student = &rep.student;
  ctx.reference = &ex.reference;
  ctx.diagnosis = &*rep.diagnosis;
  ctx.exercise = ex.id;
  ctx.prerequisites = ex.prerequisites;
  for (const auto& m : rep.diagnosis->mismatches)
    rep.classifications.push_back(classify(m, sla, ctx, opt.classifier));
  rep.plan = assess_modification_plan(*rep.diagnosis, rep.student, ex.reference, ex.prerequisites);
  return rep;
}

}  // namespace cdiag
