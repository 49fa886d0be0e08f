// Event streams (code snapshots, gaze, emotion, social, surveys) normalized
// into student-model observations.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdiag/fixture.hpp"
#include "cdiag/matcher.hpp"
#include "cdiag/sla.hpp"

namespace cdiag {

/// Malformed input; `key` names the offending field ("answers.7", "dwell_ms").
class IngestError : public std::runtime_error {
 public:
  IngestError(std::string key, const std::string& what, int line = 0)
      : std::runtime_error(format(key, what, line)), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, const std::string& what, int line) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    return where + "'" + key + "': " + what;
  }
  std::string key_;
  int line_;
};

inline constexpr int kEventSchemaVersion = 1;

struct CodeSnapshot {
  std::int64_t timestamp = 0;
  std::string student_id;
  std::string exercise_id;
  std::string source;
};

struct GazeEvent {
  std::int64_t timestamp = 0;
  std::string student_id;
  SourceSpan span;
  double dwell_ms = 0.0;
};

struct EmotionEvent {
  std::int64_t timestamp = 0;
  std::string speaker_id;
  Emotion label = Emotion::Neutral;
  double confidence = 1.0;
};

struct SocialEvent {
  std::int64_t timestamp = 0;
  std::string speaker_id;
  double duration_s = 0.0;
};

struct ReportedError {
  ConceptId concept_id = ConceptId::LoopControl;
  std::string kind;  // misconception category name
};

struct SurveyAnswer {
  std::string text;  // stored verbatim
  std::optional<int> attempts;
  std::vector<ReportedError> errors;
  std::optional<bool> predicted_correct;
  std::optional<bool> observed_correct;
  std::optional<double> similarity;  // 0..1
};

struct SurveyRecord {
  std::int64_t timestamp = 0;
  std::string student_id;
  std::string exercise_id;
  std::vector<std::pair<std::string, SurveyAnswer>> answers;  // questionnaire order
};

struct SurveyQuestion {
  std::string key;
  std::string text;
  std::vector<ConceptId> concepts;
  std::vector<std::string> fields;  // allowed answer fields
};

struct Questionnaire {
  std::string id;
  std::string title;
  std::string similarity_key;
  std::vector<SurveyQuestion> questions;
};

Questionnaire load_questionnaire(const std::string& path);
Questionnaire questionnaire_from_json(const nlohmann::json& j);

// ---- line parsing ----------------------------------------------------------------

CodeSnapshot snapshot_from_json(const nlohmann::json& j, int line = 0);
GazeEvent gaze_from_json(const nlohmann::json& j, int line = 0);
EmotionEvent emotion_from_json(const nlohmann::json& j, int line = 0);
SocialEvent social_from_json(const nlohmann::json& j, int line = 0);
/// Every declared question must be answered and nothing else; fields outside
/// a question's declared set are rejected.
SurveyRecord survey_from_json(const nlohmann::json& j, const Questionnaire& q, int line = 0);

nlohmann::json to_json(const CodeSnapshot& s);
nlohmann::json to_json(const GazeEvent& e);
nlohmann::json to_json(const EmotionEvent& e);
nlohmann::json to_json(const SocialEvent& e);
nlohmann::json to_json(const SurveyRecord& r);

/// Non-empty lines of a JSON-lines file, parsed; errors carry the line number.
std::vector<std::pair<int, nlohmann::json>> read_jsonl(const std::string& path);

std::uint64_t fnv1a64(std::string_view data);

// ---- snapshots -------------------------------------------------------------------

struct LineEdit {
  bool insert = false;  // false: deleted from prev
  int line = 0;         // 1-based, in prev for deletions and next for insertions
  std::string text;
};

struct SnapshotDiff {
  bool parse_failed = false;      // either side failed to parse; line diff used
  std::vector<Edit> edits;        // prev -> next statement edits
  std::vector<LineEdit> lines;    // fallback

  bool empty() const { return edits.empty() && lines.empty(); }
};

/// Statement-level edits turning `prev` into `next`, or a line diff when
/// either does not parse. Throws std::invalid_argument on mismatched students,
/// exercises or decreasing timestamps.
SnapshotDiff diff_snapshots(const CodeSnapshot& prev, const CodeSnapshot& next);

/// Per-(student, exercise) ordered snapshot streams.
class SnapshotLog {
 public:
  /// Throws IngestError when the snapshot precedes the stream's last one.
  void append(CodeSnapshot s, int line = 0);
  const std::vector<CodeSnapshot>& stream(const std::string& student,
                                          const std::string& exercise) const;
  std::vector<std::pair<std::string, std::string>> keys() const;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<CodeSnapshot>> streams_;
};

// ---- gaze ------------------------------------------------------------------------

struct FragmentDwell {
  SourceSpan span;
  double dwell_ms = 0.0;
  int revisits = 0;
  bool changed = false;  // overlaps an edit made before the next snapshot
};

struct WindowSummary {
  int snapshot = 0;  // index of the snapshot opening the window
  std::int64_t start = 0, end = 0;
  std::vector<FragmentDwell> fragments;  // sorted by span
};

struct GazeSummary {
  std::vector<WindowSummary> windows;
  double total_ms = 0.0;
  double changed_ms = 0.0;
  double unchanged_ms = 0.0;
  int events = 0;
  int dropped = 0;  // outside every window or span invalid for its snapshot
};

/// Window i spans [t_i, t_{i+1}); the last one lasts `sampling_period` seconds.
GazeSummary correlate_gaze(const std::vector<GazeEvent>& events,
                           const std::vector<CodeSnapshot>& snapshots,
                           std::int64_t sampling_period = 120);

// ---- surveys ---------------------------------------------------------------------

struct SurveyObservations {
  RecallObservation recall;
  std::optional<AdjustmentObservation> adjustment;  // needs a similarity answer
};

/// Attempts = the largest reported count; recall errors counted per concept;
/// Imp = fraction of answers whose predicted and observed correctness agree.
SurveyObservations survey_to_observations(const SurveyRecord& r, const Questionnaire& q,
                                          Emotion emotion = Emotion::Neutral, double social = 1.0);

// ---- file ingestion --------------------------------------------------------------

enum class StreamKind { Snapshots, Gaze, Emotion, Social, Survey };

const char* stream_kind_name(StreamKind k);
std::optional<StreamKind> stream_kind_from_name(std::string_view s);

struct IngestContext {
  std::map<std::string, Exercise> exercises;  // by id; needed for surveys
  std::vector<CodeSnapshot> snapshots;        // gaze windows
  std::int64_t sampling_period = 120;
  SlaParams params;
};

struct IngestReport {
  StreamKind kind = StreamKind::Snapshots;
  std::string path;
  std::string hash;  // hex FNV-1a of the file content
  int read = 0;
  int applied = 0;
  int dropped = 0;
  int duplicate = 0;  // already ingested into the student's record
  std::vector<std::string> students;
  std::vector<std::string> warnings;

  bool reconciles() const { return read == applied + dropped + duplicate; }
};

/// Validate the whole file first, then apply it to every student it names.
/// A file whose hash a student's record already lists is skipped for that
/// student, so re-ingesting changes nothing.
IngestReport ingest_file(SlaStore& store, StreamKind kind, const std::string& path,
                         const IngestContext& ctx);

}  // namespace cdiag
