#include <doctest.h>

#include <algorithm>

#include "cdiag/matcher.hpp"
#include "cdiag/mutate.hpp"
#include "helpers.hpp"

using namespace cdiag;

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
  return s;
}

std::vector<ExecutionTrace> runs(const Ast& a, const std::vector<TestCase>& tests) {
  std::vector<ExecutionTrace> out;
  for (const auto& t : tests) out.push_back(execute(a, t));
  return out;
}

}  // namespace

// The pattern count with `first` as a three-state machine and no `second`
// flag; a match restarts the scan, so overlapping occurrences are lost.
const char* kStateMachine = R"(#include <stdio.h>
FILE *fp;
char s[32];
char c;
int len;
int count;
int words;
void scan_word() {
  int i;
  int first;
  i = 0;
  first = 0;
  while (i < len) {
    if (s[i] == 'p') {
      if (first == 2) {
        count++;
        first = 0;
      } else {
        first = 1;
      }
    } else {
      if (first == 1 && s[i] == 'a') {
        first = 2;
      } else {
        first = 0;
      }
    }
    i++;
  }
  if (len > 0) {
    words++;
  }
}
int main() {
  fp = fopen("input.txt", "r");
  if (fp == NULL) {
    printf("cannot open input.txt\n");
    return 1;
  }
  count = 0;
  words = 0;
  len = 0;
  while (fscanf(fp, "%c", &c) == 1) {
    if (c == ' ' || c == '\t' || c == '\n') {
      scan_word();
      len = 0;
    } else {
      if (len < 31) {
        s[len] = c;
        len++;
      }
    }
  }
  scan_word();
  fclose(fp);
  printf("%d %d\n", count, words);
  return 0;
}
)";

// Looks back at the word instead of keeping the `second` flag.
std::string no_second_flag(std::string src) {
  auto cut = [&](const std::string& text) {
    size_t at = src.find(text);
    REQUIRE(at != std::string::npos);
    src.erase(at, text.size());
  };
  cut("  int second;\n");
  cut("  second = -1;\n");
  cut("      second = -1;\n");
  src = replace_all(src, "if (second == 1)", "if (i >= 2 && s[i - 1] == 'a' && s[i - 2] == 'p')");
  src = replace_all(src, R"(      if (first == 1 && s[i] == 'a') {
        second = 1;
      } else {
        second = -1;
      }
)", "");
  return src;
}

TEST_CASE("variable mapping") {
  const Exercise& ex = testing::pap();
  auto ref_runs = runs(ex.reference, ex.tests);

  SUBCASE("identical programs map onto themselves") {
    VariableMapping m = map_variables(ex.reference, ex.reference, ref_runs, ref_runs);
    CHECK(m.unmatched_student.empty());
    CHECK(m.unmatched_reference.empty());
    for (const auto& p : m.pairs) {
      CHECK(p.student == p.reference);
      CHECK(p.score == doctest::Approx(1.0));
    }
  }
  SUBCASE("a renamed counter is recovered") {
    Ast student = testing::parse_ok(replace_all(ex.reference_source, "count", "cnt"));
    VariableMapping m = map_variables(student, ex.reference, runs(student, ex.tests), ref_runs);
    auto it = std::find_if(m.pairs.begin(), m.pairs.end(),
                           [](const VariablePair& p) { return p.student == "cnt"; });
    REQUIRE(it != m.pairs.end());
    CHECK(it->reference == "count");
    CHECK(it->score >= 0.9);
    for (const auto& p : m.pairs)
      if (p.student != "cnt") CHECK(p.student == p.reference);
  }
  SUBCASE("a missing flag variable stays unmatched") {
    std::string src = no_second_flag(ex.reference_source);
    REQUIRE(src.find("second") == std::string::npos);
    Ast student = testing::parse_ok(src);
    VariableMapping m = map_variables(student, ex.reference, runs(student, ex.tests), ref_runs);
    for (const auto& p : m.pairs) CHECK(p.student == p.reference);
    CHECK(std::count(m.unmatched_reference.begin(), m.unmatched_reference.end(), "second") == 1);
  }
}

TEST_CASE("structural differencing") {
  const Exercise& ex = testing::pap();

  SUBCASE("a renamed copy has an empty script") {
    Ast student = testing::parse_ok(replace_all(ex.reference_source, "count", "cnt"));
    VariableMapping m = identity_mapping(student, ex.reference);
    m.pairs.push_back({"cnt", "count", 1.0});
    m.unmatched_student.clear();
    m.unmatched_reference.clear();
    CHECK(diff_programs(student, ex.reference, m).empty());
  }
  SUBCASE("an omitted initialization is one delete") {
    std::string src = ex.reference_source;
    size_t at = src.find("  second = -1;\n  while");
    REQUIRE(at != std::string::npos);
    src.erase(at, std::string("  second = -1;\n").size());
    Ast student = testing::parse_ok(src);
    auto edits = diff_programs(student, ex.reference, identity_mapping(student, ex.reference));
    REQUIRE(edits.size() == 1);
    CHECK(edits[0].kind == EditKind::Delete);
    CHECK(edits[0].reference_label.find("second = -1") != std::string::npos);
  }
  SUBCASE("masks built with & and | update the mask block") {
    const Exercise& bx = testing::bitmask();
    auto sites = mutation_sites(bx.reference, "mask-fixation");
    REQUIRE_FALSE(sites.empty());
    Ast student = mutated_ast(bx.reference, sites.front());
    auto edits = diff_programs(student, bx.reference, identity_mapping(student, bx.reference));
    REQUIRE_FALSE(edits.empty());
    bool on_mask = false;
    for (const auto& e : edits)
      on_mask = on_mask || (e.kind == EditKind::Update && e.reference_label.find("mask") != std::string::npos);
    CHECK(on_mask);
  }
}

TEST_CASE("locating mismatches") {
  const Exercise& ex = testing::pap();

  SUBCASE("a correct solution") {
    Diagnosis d = locate_mismatches(ex.reference, ex.reference, ex.tests);
    CHECK(d.mismatches.empty());
    CHECK(d.response.all_match());
  }
  SUBCASE("non-overlapping counting diverges in value on papap") {
    TestCase t = testing::word_file("papap");
    t.id = "papap";
    Ast student = testing::parse_ok(kStateMachine);
    Diagnosis d = locate_mismatches(student, ex.reference, {t});
    REQUIRE_FALSE(d.mismatches.empty());
    CHECK(d.mismatches[0].kind == MismatchKind::ValueDivergence);
    CHECK(d.mismatches[0].first_divergent_test == "papap");
    CHECK(d.student_traces[0].stdout_text == "1 1\n");
    CHECK(d.reference_traces[0].stdout_text == "2 1\n");
    const Node* loop = find_function(ex.reference, "scan_word");
    REQUIRE(loop);
    REQUIRE(d.mismatches[0].reference_span);
    CHECK(d.mismatches[0].reference_span->start_line >= loop->span.start_line);
    CHECK(d.mismatches[0].reference_span->end_line <= loop->span.end_line);
  }
  SUBCASE("reading before the word crashes on an empty input") {
    std::string src = ex.reference_source;
    size_t at = src.find("  i = 0;\n  first = -1;");
    REQUIRE(at != std::string::npos);
    src.insert(at, "  if (s[len - 1] == 'x') {\n    words++;\n  }\n");
    Ast student = testing::parse_ok(src);
    TestCase empty = testing::word_file("");
    empty.id = "empty";
    Diagnosis d = locate_mismatches(student, ex.reference, {empty});
    REQUIRE(d.response.size() == 1);
    CHECK(d.response.codes[0] == OutcomeCode::Crash);
    bool outcome = false;
    for (const auto& m : d.mismatches) outcome = outcome || m.kind == MismatchKind::OutcomeDivergence;
    CHECK(outcome);
  }
}

TEST_CASE("response distance") {
  ResponseVector a = all_match_response(10), b = a;
  CHECK(response_distance(a, b) == 0.0);
  b.codes[2] = OutcomeCode::Crash;
  b.codes[7] = OutcomeCode::StdoutMismatch;
  CHECK(response_distance(a, b) == doctest::Approx(0.2));
}
