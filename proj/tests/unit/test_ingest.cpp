#include <doctest.h>

#include "cdiag/ingest.hpp"
#include "helpers.hpp"

using namespace cdiag;
using nlohmann::json;

namespace {

CodeSnapshot snap(std::int64_t t, std::string src) {
  CodeSnapshot s;
  s.timestamp = t;
  s.student_id = "s1";
  s.exercise_id = "bitmask";
  s.source = std::move(src);
  return s;
}

GazeEvent look(std::int64_t t, SourceSpan span, double ms) {
  GazeEvent e;
  e.timestamp = t;
  e.student_id = "s1";
  e.span = span;
  e.dwell_ms = ms;
  return e;
}

const char* kSmall = "int main() {\n  int a;\n  a = 1;\n  return 0;\n}\n";
const char* kSmallPlus = "int main() {\n  int a;\n  a = 1;\n  a = a + 1;\n  return 0;\n}\n";

Questionnaire basic() { return load_questionnaire(shipped_fixtures_dir() + "/surveys/basic.json"); }

json full_answers(const Questionnaire& q) {
  json a = json::object();
  for (const auto& item : q.questions) a[item.key] = {{"text", "ok"}};
  return a;
}

}  // namespace

TEST_CASE("snapshot differences") {
  CHECK(diff_snapshots(snap(1, kSmall), snap(2, kSmall)).empty());

  SnapshotDiff one = diff_snapshots(snap(1, kSmall), snap(2, kSmallPlus));
  REQUIRE(one.edits.size() == 1);
  CHECK(one.edits[0].kind == EditKind::Insert);

  SnapshotDiff broken = diff_snapshots(snap(1, kSmall), snap(2, "int main() {\n  int a\n  return 0;\n}\n"));
  CHECK(broken.parse_failed);
  CHECK_FALSE(broken.lines.empty());

  SnapshotLog log;
  log.append(snap(5, kSmall));
  CHECK_THROWS_AS(log.append(snap(4, kSmall)), IngestError);
}

TEST_CASE("gaze windows") {
  std::vector<CodeSnapshot> snaps{snap(100, kSmall), snap(200, kSmallPlus)};
  SourceSpan span;
  span.start_line = 2;
  span.start_col = 3;
  span.end_line = 2;
  span.end_col = 9;

  GazeSummary none = correlate_gaze({}, snaps);
  CHECK(none.total_ms == 0.0);
  for (const auto& w : none.windows) CHECK(w.fragments.empty());

  GazeSummary g = correlate_gaze({look(110, span, 1000), look(120, span, 2000), look(130, span, 1500)}, snaps);
  REQUIRE_FALSE(g.windows.empty());
  REQUIRE(g.windows[0].fragments.size() == 1);
  CHECK(g.windows[0].fragments[0].dwell_ms == 4500.0);
  CHECK(g.windows[0].fragments[0].revisits == 3);
  CHECK(g.changed_ms + g.unchanged_ms == g.total_ms);
}

TEST_CASE("questionnaires") {
  Questionnaire q = basic();
  REQUIRE(q.questions.size() == 10);

  SUBCASE("attempts and errors") {
    json a = full_answers(q);
    a["2"] = {{"text", "x"},
              {"attempts", 3},
              {"errors", json::array({{{"concept", "input-read"}, {"kind", "incorrect-recall"}},
                                      {{"concept", "loop-control"}, {"kind", "incorrect-extension"}}})}};
    json rec = {{"schema_version", 1}, {"timestamp", 10}, {"student_id", "s1"},
                {"exercise_id", "pap_counter"}, {"answers", a}};
    SurveyObservations o = survey_to_observations(survey_from_json(rec, q), q);
    CHECK(o.recall.attempts == 3);
    int errors = 0;
    for (const auto& [c, n] : o.recall.errors) errors += n;
    CHECK(errors == 2);
  }
  SUBCASE("similarity becomes the exercise distance") {
    json a = full_answers(q);
    a[q.similarity_key] = {{"text", "x"}, {"similarity", 0.6}};
    json rec = {{"schema_version", 1}, {"timestamp", 10}, {"student_id", "s1"},
                {"exercise_id", "pap_counter"}, {"answers", a}};
    SurveyObservations o = survey_to_observations(survey_from_json(rec, q), q);
    REQUIRE(o.adjustment);
    CHECK(o.adjustment->dsim == doctest::Approx(0.6));
  }
  SUBCASE("a missing answer names its key") {
    json a = full_answers(q);
    a.erase("7");
    json rec = {{"schema_version", 1}, {"timestamp", 10}, {"student_id", "s1"},
                {"exercise_id", "pap_counter"}, {"answers", a}};
    try {
      survey_from_json(rec, q);
      FAIL("accepted a record without answer 7");
    } catch (const IngestError& e) {
      CHECK(e.key() == "answers.7");
    }
  }
}
