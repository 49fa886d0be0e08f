#include <doctest.h>

#include <cmath>

#include "cdiag/classifier.hpp"
#include "cdiag/mutate.hpp"
#include "cdiag/pipeline.hpp"
#include "helpers.hpp"

using namespace cdiag;

namespace {

std::optional<MutationSite> site_with(const Ast& a, const std::string& op, const std::string& needle = "") {
  for (const auto& s : mutation_sites(a, op))
    if (s.description.find(needle) != std::string::npos) return s;
  return std::nullopt;
}

}  // namespace

TEST_CASE("adjustment error score") {
  const Exercise& ex = testing::pap();

  SUBCASE("no mismatches score zero") {
    Diagnosis d = locate_mismatches(ex.reference, ex.reference, ex.tests);
    CHECK(score_adjustment(ConceptId::IfCondition, d.mismatches, ex.reference, ex.reference, d, ex.tests)
              .score == 0.0);
  }
  SUBCASE("dropping the tab separator scores on tab input") {
    auto site = site_with(ex.reference, "narrow-separators", "'\\t'");
    REQUIRE(site);
    Ast student = mutated_ast(ex.reference, *site);
    TestCase tab = testing::word_file("pap\tpap");
    tab.id = "tab";
    Diagnosis d = locate_mismatches(student, ex.reference, {tab});
    REQUIRE_FALSE(d.mismatches.empty());
    AdjustmentErrorScore s = score_adjustment(d.mismatches[0].edit.concept_id, d.mismatches, student,
                                              ex.reference, d, {tab});
    CHECK(s.score > 0.0);
  }
  SUBCASE("independent errors add up") {
    // Two statements of the word scan that neither contain nor call each other.
    auto letter = site_with(ex.reference, "wrong-char", "instead of 'a'");
    auto bound = site_with(ex.reference, "relax-bound", "len > 0");
    REQUIRE(letter);
    REQUIRE(bound);
    Ast one = mutated_ast(ex.reference, *letter);
    Ast two = mutated_ast(ex.reference, *bound);
    auto bound_in_one = site_with(one, "relax-bound", "len > 0");
    REQUIRE(bound_in_one);
    Ast both = mutated_ast(one, *bound_in_one);

    TestCase t1 = testing::word_file("papap");
    t1.id = "overlap";
    TestCase t2 = testing::word_file("pap  pap");
    t2.id = "empty-word";
    std::vector<TestCase> tests{t1, t2};
    auto score = [&](const Ast& s) {
      Diagnosis d = locate_mismatches(s, ex.reference, tests);
      double total = 0.0;
      for (ConceptId c : kAllConcepts)
        total += score_adjustment(c, d.mismatches, s, ex.reference, d, tests).score;
      return total;
    };
    double a = score(one), b = score(two), ab = score(both);
    CHECK(a > 0.0);
    CHECK(b > 0.0);
    CHECK(ab == doctest::Approx(a + b).epsilon(1e-9));
  }
}

TEST_CASE("modification plan") {
  const Exercise& ex = testing::pap();

  SUBCASE("a correct program completes every step") {
    Diagnosis d = locate_mismatches(ex.reference, ex.reference, ex.tests);
    ModificationPlan p = assess_modification_plan(d, ex.reference, ex.reference);
    for (const auto& s : p.steps) CHECK(s.complete);
  }
  SUBCASE("an update moved out of its block leaves steps 1-3 complete") {
    auto site = site_with(ex.reference, "hoist-update");
    REQUIRE(site);
    Ast student = mutated_ast(ex.reference, *site);
    Diagnosis d = locate_mismatches(student, ex.reference, ex.tests);
    ModificationPlan p = assess_modification_plan(d, student, ex.reference);
    CHECK(p.steps[0].complete);
    CHECK(p.steps[1].complete);
    CHECK(p.steps[2].complete);
    CHECK_FALSE(p.steps[3].complete);
    CHECK(p.precedence_holds());
  }
}

TEST_CASE("categories of the worked examples") {
  SlaRecord sla = empty_record("s");

  SUBCASE("an untyped declaration is a recall error") {
    std::string src = "int main() {\n  variable value;\n  return 0;\n}\n";
    ParseResult r = parse(src);
    Classification c = classify_parse_failure(r.errors, src, sla);
    CHECK(c.category == MisconceptionCategory::IncorrectRecall);
    CHECK(c.concept_id == ConceptId::VariableDeclaration);
  }
  SUBCASE("a char read with %x is an extension error") {
    const Exercise& bx = testing::bitmask();
    auto site = site_with(bx.reference, "char-for-hex");
    REQUIRE(site);
    SubmissionReport rep = diagnose_submission(apply_mutation(bx.reference, *site).source, bx, sla);
    REQUIRE(rep.primary());
    CHECK(*rep.primary() == MisconceptionCategory::IncorrectExtension);
  }
  SUBCASE("mask fixation is a modification error") {
    const Exercise& bx = testing::bitmask();
    auto site = site_with(bx.reference, "mask-fixation");
    REQUIRE(site);
    SubmissionReport rep = diagnose_submission(apply_mutation(bx.reference, *site).source, bx, sla);
    REQUIRE(rep.primary());
    CHECK(*rep.primary() == MisconceptionCategory::IncorrectModification);
  }
  SUBCASE("a main with declarations only is stuck at start") {
    const Exercise& bx = testing::bitmask();
    SubmissionReport rep = diagnose_submission(
        "int main() {\n  unsigned int value;\n  unsigned int second;\n  return 0;\n}\n", bx, sla);
    REQUIRE(rep.primary());
    CHECK(*rep.primary() == MisconceptionCategory::StuckAtStart);
  }
}
