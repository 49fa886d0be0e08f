#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cdiag/dialog.hpp"
#include "cdiag/report_json.hpp"
#include "helpers.hpp"

using namespace cdiag;

namespace {

const QuestionGraph& mask_graph() {
  static const QuestionGraph g = build_question_graph(testing::bitmask());
  return g;
}

double total(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

/// A graph over two catalog targets of `full`, one question each.
QuestionGraph two_targets(const QuestionGraph& full, int a, int b) {
  QuestionGraph g;
  for (int i : {a, b}) {
    g.catalog.push_back(full.catalog[static_cast<size_t>(i)]);
    for (const auto& q : full.questions)
      if (q.target == full.catalog[static_cast<size_t>(i)].target) {
        Question c = q;
        c.id = static_cast<int>(g.questions.size());
        c.edges.clear();
        g.questions.push_back(c);
        break;
      }
  }
  return g;
}

}  // namespace

TEST_CASE("question graph") {
  const QuestionGraph& g = mask_graph();
  REQUIRE_FALSE(g.questions.empty());
  for (const auto& q : g.questions) {
    if (q.link == LinkKind::Synonym) CHECK(q.prompt.find("same problem but for other masks") != std::string::npos);
    if (q.link == LinkKind::Homonym)
      CHECK(q.prompt.find("masks for other kinds of bit-level operators") != std::string::npos);
    if (q.link == LinkKind::Abstraction)
      CHECK(q.prompt.find("parameterized masks instead of a static mask") != std::string::npos);
    CHECK(q.probes.size() == 6);
    for (const auto& e : q.edges) CHECK(g.questions[static_cast<size_t>(e.to)].target.concept_id == q.target.concept_id);
  }
}

TEST_CASE("student answers") {
  const Exercise& ex = testing::bitmask();
  const QuestionGraph& g = mask_graph();
  ResponseOracle oracle(ex, g);
  DialogParams p;

  SUBCASE("no misunderstanding answers like the reference") {
    SimulatedStudent st;
    for (const auto& q : g.questions) CHECK(student_respond(st, q, oracle, p).observed.response.all_match());
  }
  SUBCASE("a recall fault on declarations does not compile") {
    Target t{ConceptId::VariableDeclaration, Component::Recall};
    REQUIRE(g.fault_for(t));
    SimulatedStudent st;
    st.delta[static_cast<size_t>(t.state())] = 1.0;
    const Question* q = nullptr;
    for (const auto& c : g.questions)
      if (c.target == t) q = &c;
    REQUIRE(q);
    StudentAnswer a = student_respond(st, *q, oracle, p);
    CHECK(a.program.find("variable value;") != std::string::npos);
    for (auto code : a.observed.response.codes) CHECK(code == OutcomeCode::Crash);
    CHECK_FALSE(a.observed.parse_signature.empty());
  }
}

TEST_CASE("discriminator") {
  const Exercise& ex = testing::bitmask();
  const QuestionGraph& g = mask_graph();
  ResponseOracle oracle(ex, g);
  DialogParams p;
  int f = g.fault_index({ConceptId::VariableDeclaration, Component::Recall});
  REQUIRE(f >= 0);

  DiscriminatorEstimate est = initial_estimate(g, p);
  CHECK(total(est.weights) == doctest::Approx(1.0));
  std::vector<double> before = est.weights;
  Observation seen{oracle.full({f}), oracle.parse_signature({f})};
  discriminator_update(est, -1, seen, oracle, p);
  CHECK(total(est.weights) == doctest::Approx(1.0));

  double crash = 0.0, clean = 0.0;
  for (size_t i = 0; i < est.candidates.size(); ++i) {
    const Candidate& c = est.candidates[i];
    if (c.initial == std::vector<int>{f}) {
      CHECK(est.weights[i] >= before[i]);
      crash += est.weights[i];
    }
    if (c.initial.empty()) clean += est.weights[i];
  }
  CHECK(crash > clean);
}

TEST_CASE("question selection") {
  const Exercise& ex = testing::bitmask();
  const QuestionGraph& full = mask_graph();
  DialogParams p;

  SUBCASE("a single question is always chosen") {
    QuestionGraph g = two_targets(full, 0, 1);
    g.catalog.pop_back();
    g.questions.pop_back();
    ResponseOracle oracle(ex, g);
    DiscriminatorEstimate est = initial_estimate(g, p);
    CHECK(select_question(est, TransitionMatrix(3 * kConceptCount, 1.0), std::nullopt, Emotion::Neutral,
                          oracle, p) == 0);
  }
  SUBCASE("the predicted-distance and gap terms can disagree") {
    QuestionGraph g = two_targets(full, 0, 1);
    ResponseOracle oracle(ex, g);
    // Only fault 0 is believed present, yet the mean severity points at target 1.
    DiscriminatorEstimate est;
    Candidate c;
    c.initial = {0};
    c.learn_rate = 1.0;
    c.current[static_cast<size_t>(g.catalog[0].target.state())] = 1.0;
    est.candidates = {c};
    est.weights = {1.0};
    est.e_delta[static_cast<size_t>(g.catalog[1].target.state())] = 1.0;
    TransitionMatrix uniform(3 * kConceptCount, 1.0);

    DialogParams distance_only = p, gap_only = p;
    distance_only.beta = 0.0;
    gap_only.alpha = 0.0;
    CHECK(select_question(est, uniform, std::nullopt, Emotion::Neutral, oracle, distance_only) == 0);
    CHECK(select_question(est, uniform, std::nullopt, Emotion::Neutral, oracle, gap_only) == 1);
  }
}

TEST_CASE("transition counts") {
  TransitionMatrix m(3 * kConceptCount, 1.0);
  for (int s = 0; s < m.size(); ++s) CHECK(m.p(0, s) == doctest::Approx(1.0 / m.size()));

  Target t{ConceptId::LoopControl, Component::Recall};
  std::vector<Target> history{t};
  for (int i = 0; i < 10; ++i) {
    update_transitions(m, history, t);
    history.push_back(t);
  }
  std::vector<double> row = m.row(t.state());
  CHECK(std::max_element(row.begin(), row.end()) - row.begin() == t.state());
  CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dialog runs") {
  for (const Exercise* ex : {&testing::pap(), &testing::bitmask()}) {
    QuestionGraph g = build_question_graph(*ex);
    ResponseOracle oracle(*ex, g);

    SUBCASE("no misunderstanding converges at once") {
      DialogTranscript t = run_dialog(SimulatedStudent{}, oracle);
      CHECK(t.report.converged);
      CHECK(t.steps.empty());
    }
    SUBCASE("a recall fault is resolved within three iterations") {
      for (const auto& c : g.catalog) {
        if (c.target.type != Component::Recall) continue;
        SimulatedStudent st;
        st.delta[static_cast<size_t>(c.target.state())] = 1.0;
        DialogTranscript t = run_dialog(st, oracle);
        CAPTURE(c.target.str());
        CHECK(t.report.reason == "resolved");
        CHECK(t.report.iterations <= 3);
      }
    }
    SUBCASE("a student who never learns hits the iteration bound") {
      SimulatedStudent st;
      st.learn_rate = 0.0;
      st.delta[static_cast<size_t>(g.catalog.front().target.state())] = 1.0;
      DialogParams p;
      p.max_iteration = 5;
      DialogTranscript t = run_dialog(st, oracle, p);
      CHECK_FALSE(t.report.converged);
      CHECK(t.report.iterations == 5);
    }
    SUBCASE("transcripts are reproducible") {
      SimulatedStudent st;
      st.seed = 7;
      st.delta[static_cast<size_t>(g.catalog.back().target.state())] = 1.0;
      CHECK(transcript_json(run_dialog(st, oracle), g).dump() == transcript_json(run_dialog(st, oracle), g).dump());
    }
  }
}
