// JSON documents emitted by the command-line tool.
#pragma once

#include <json.hpp>

#include "cdiag/dialog.hpp"
#include "cdiag/pipeline.hpp"

namespace cdiag {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const ResponseVector& r);
nlohmann::json to_json(const VariableMapping& m);
nlohmann::json to_json(const Mismatch& m);
nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const ModificationPlan& p);
nlohmann::json to_json(const MisunderstandingProfile& p);

/// Diagnosis report of one submission.
nlohmann::json report_json(const SubmissionReport& r);

/// Full dialog transcript, including the question graph it ran on.
nlohmann::json transcript_json(const DialogTranscript& t, const QuestionGraph& g);

/// One JSON object per recorded step, then a closing summary line.
std::vector<nlohmann::json> trace_lines(const ExecutionTrace& t);

/// `{concept: {r, e, m}}`; throws std::invalid_argument naming the bad key.
MisunderstandingProfile profile_from_json(const nlohmann::json& j);

}  // namespace cdiag
