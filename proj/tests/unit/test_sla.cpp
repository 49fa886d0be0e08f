#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cdiag/sla.hpp"

using namespace cdiag;
namespace fs = std::filesystem;

namespace {

RecallObservation clean_recall(ConceptId c, Emotion e = Emotion::Neutral) {
  RecallObservation o;
  o.concepts = {c};
  o.emotion = e;
  return o;
}

AdjustmentObservation adjustment(double dsim) {
  AdjustmentObservation o;
  o.exercise = "pap_counter";
  o.concepts = {ConceptId::PatternScan, ConceptId::LoopControl};
  o.dsim = dsim;
  o.imp = 1.0;
  return o;
}

}  // namespace

TEST_CASE("recall tracing") {
  SUBCASE("an error-free observation raises P(known) without slip or guess") {
    SlaParams p;
    p.slip = 0.0;
    p.guess = 0.0;
    SlaRecord r = empty_record("s");
    RecallResult res = update_recall(r, clean_recall(ConceptId::LoopControl), p);
    CHECK(res.known.at(ConceptId::LoopControl) > 0.3);
  }
  SUBCASE("anger learns no more than neutral") {
    SlaRecord calm = empty_record("a"), angry = empty_record("b");
    double n = update_recall(calm, clean_recall(ConceptId::IfCondition)).known.at(ConceptId::IfCondition);
    double a = update_recall(angry, clean_recall(ConceptId::IfCondition, Emotion::Anger))
                   .known.at(ConceptId::IfCondition);
    CHECK(a <= n);
  }
}

TEST_CASE("adjustment prediction") {
  SlaRecord r = empty_record("s");
  r.known[ConceptId::PatternScan] = 1.0;
  r.known[ConceptId::LoopControl] = 1.0;
  CHECK(predict_adjustment(r, adjustment(1.0)) >= recall_probability(1.0));
  CHECK(predict_adjustment(r, adjustment(0.0)) <= predict_adjustment(r, adjustment(1.0)));

  AdjustmentObservation o = adjustment(0.5);
  o.activities = {Activity::FindDifferences, Activity::PredictResults, Activity::FindDifferences,
                  Activity::ChangeConcepts};
  for (int i = 0; i < 20; ++i) update_adjustment(r, o);
  for (int a = 0; a < kActivityCount; ++a) {
    double sum = 0.0;
    for (double v : r.activities.row(a)) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("causal product") {
  CHECK(causal_product({1.0, 1.0, 1.0}, 1.0) == 1.0);
  CHECK(causal_product({0.9, 0.0, 0.9}, 1.0) == 0.0);
  CHECK(causal_product({0.9, 0.8, 0.9}, 1.0) == doctest::Approx(0.648));
}

TEST_CASE("trace capacity") {
  TraceDiscoveryEvent e;
  e.exercise = "pap_counter";
  e.signature = "t1";
  e.new_sim = 1.0;
  e.cog_eff = 60;
  CHECK(capacity_delta(e) == 0.0);
  e.new_sim = 0.2;
  TraceDiscoveryEvent slow = e;
  slow.cog_eff = 600;
  CHECK(capacity_delta(e) > capacity_delta(slow));
}

TEST_CASE("persistence") {
  fs::path dir = fs::temp_directory_path() / "cdiag_unit_sla";
  fs::remove_all(dir);
  SlaStore store(dir.string());

  SlaRecord r = empty_record("s1");
  update_recall(r, clean_recall(ConceptId::BitwiseMask));
  record_error(r, ConceptId::BitwiseMask, Component::Modification, "incorrect-modification", 0.25);
  store.save(r);
  CHECK(store.load("s1") == r);

  SlaRecord fresh = store.load("nobody");
  CHECK(fresh.known.empty());
  CHECK(fresh.known_or(ConceptId::LoopControl, SlaParams{}.prior) == 0.3);

  std::string text = to_json_text(r);
  CHECK_THROWS_AS(from_json_text(text.substr(0, text.size() / 2)), SchemaViolation);
  fs::remove_all(dir);
}
