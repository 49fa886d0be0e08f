// Diagnostic dialog: question graph, simulated student, Bayesian
// discriminator over candidate misunderstanding profiles, question selection
// and convergence monitoring.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cdiag/fixture.hpp"
#include "cdiag/matcher.hpp"
#include "cdiag/mutate.hpp"
#include "cdiag/profile.hpp"
#include "cdiag/sla.hpp"

namespace cdiag {

enum class LinkKind { Synonym, Homonym, Abstraction };

const char* link_kind_name(LinkKind k);

/// (concept, component) a question or fault is about.
struct Target {
  ConceptId concept_id = ConceptId::LoopControl;
  Component type = Component::Recall;

  /// Row/column of the question transition matrix: type * 10 + concept.
  int state() const { return static_cast<int>(type) * kConceptCount + static_cast<int>(concept_id); }
  std::string str() const;
  friend auto operator<=>(const Target&, const Target&) = default;
};

Target target_from_state(int state);

/// Component a seeded mutation category exercises.
Component component_for(MutationCategory c);

/// The one canonical fault per target used to realize a profile in code.
struct CatalogEntry {
  Target target;
  MutationSite site;
  bool breaks_parse = false;
};

struct QuestionEdge {
  int to = -1;
  LinkKind kind = LinkKind::Synonym;
};

struct Question {
  int id = 0;
  Target target;
  LinkKind link = LinkKind::Synonym;
  std::string prompt;
  std::vector<TestCase> probes;  // exactly probes_per_question, cycled
  std::vector<QuestionEdge> edges;
};

struct QuestionGraph {
  std::vector<CatalogEntry> catalog;  // sorted by target
  std::vector<Question> questions;

  const CatalogEntry* fault_for(const Target& t) const;
  int fault_index(const Target& t) const;  // -1 when absent
  /// Fewest edges from question `from` to any question on `t`; questions on
  /// another connected component count as the number of questions.
  int distance(int from, const Target& t) const;
};

/// Catalog from the first killed mutation site per (concept, component), then
/// two questions per target: one whose link kind follows the component
/// (synonym for recall, homonym for extension, abstraction for modification)
/// and a synonym variant on a different probe slice.
QuestionGraph build_question_graph(const Exercise& ex);

// ---- responses -------------------------------------------------------------------

/// Executes reference-plus-faults programs, caching responses by fault set.
class ResponseOracle {
 public:
  ResponseOracle(const Exercise& ex, const QuestionGraph& g);

  /// Response of the reference with catalog faults `faults` applied (sorted
  /// indices) on the full test suite.
  const ResponseVector& full(const std::vector<int>& faults);
  /// Same on a question's probes, keeping only faults on the question's concept.
  const ResponseVector& on_question(const std::vector<int>& faults, int question);
  /// Source of the reference with the faults applied.
  std::string program(const std::vector<int>& faults) const;
  /// Location and message of the first parse error of that program; empty
  /// when it parses. The question variant keeps the question's concept only.
  const std::string& parse_signature(const std::vector<int>& faults);
  const std::string& parse_signature(const std::vector<int>& faults, int question);

  const Exercise& exercise() const { return ex_; }
  const QuestionGraph& graph() const { return g_; }

 private:
  ResponseVector run(const std::vector<int>& faults, const std::vector<TestCase>& tests,
                     const std::vector<ExecutionTrace>& ref);
  const Exercise& ex_;
  const QuestionGraph& g_;
  std::vector<ExecutionTrace> ref_full_;
  std::vector<std::vector<ExecutionTrace>> ref_probe_;
  std::mutex mu_;
  std::map<std::vector<int>, std::unique_ptr<ResponseVector>> full_cache_;
  std::map<std::pair<std::vector<int>, int>, std::unique_ptr<ResponseVector>> q_cache_;
  std::map<std::vector<int>, std::unique_ptr<std::string>> sig_cache_;
};

// ---- student and estimate --------------------------------------------------------

struct DialogParams {
  double lambda = 0.1;
  double alpha = 1.0;
  double beta = 0.5;
  double threshold = 0.5;  // severity above which a fault shows in code
  double resolved = 0.05;  // true severities below this count as resolved
  double stable_eps = 1e-3;
  int stable_iterations = 3;
  int max_iteration = 20;
  std::array<double, 3> link_factor = {1.0, 0.7, 0.5};  // synonym, homonym, abstraction
  std::vector<double> learn_rates = {0.0, 0.5, 1.0};    // candidate hypotheses
  SlaParams sla;
};

/// Severity per target as a dense vector indexed by Target::state().
using SeverityVector = std::array<double, 3 * kConceptCount>;

SeverityVector severities_of(const MisunderstandingProfile& p);
MisunderstandingProfile profile_of(const SeverityVector& v);

struct SimulatedStudent {
  SeverityVector delta{};
  double learn_rate = 1.0;
  Emotion emotion = Emotion::Neutral;
  std::uint64_t seed = 0;
};

/// Catalog faults whose severity exceeds the threshold, sorted.
std::vector<int> active_faults(const SeverityVector& s, const QuestionGraph& g, double threshold);

/// Severity after a question: the component on the question's target drops by
/// learn rate x link factor x emotion factor, never below zero.
void learn_from(SeverityVector& s, const Question& q, double learn_rate, Emotion e,
                const DialogParams& p);

/// What the tutor sees of an answer: test outcomes plus the compiler's first
/// complaint, if any.
struct Observation {
  ResponseVector response;
  std::string parse_signature;
};

struct StudentAnswer {
  std::string program;  // the student's code when answering
  Observation observed;
};

/// Respond on the question's probes, then learn from it.
StudentAnswer student_respond(SimulatedStudent& st, const Question& q, ResponseOracle& oracle,
                              const DialogParams& p);

struct Candidate {
  std::vector<int> initial;  // catalog faults present at the start
  double learn_rate = 0.0;
  SeverityVector current{};  // severities after the questions so far
};

struct DiscriminatorEstimate {
  std::vector<Candidate> candidates;
  std::vector<double> weights;  // sum to 1
  SeverityVector e_delta{};     // posterior mean of current severities
  int uniform_fallbacks = 0;

  /// Posterior mass of candidates whose initial faults include each target.
  std::map<Target, double> initial_marginal(const QuestionGraph& g) const;
  /// Most likely initially misunderstood target, if any fault outweighs "none".
  std::optional<Target> diagnosis(const QuestionGraph& g) const;
  std::optional<Target> estimate_argmax(const QuestionGraph& g, double threshold) const;
};

/// Zero, single and double fault sets crossed with the learn-rate hypotheses;
/// uniform weights.
DiscriminatorEstimate initial_estimate(const QuestionGraph& g, const DialogParams& p);

/// Reweight by exp(-d / lambda), d = response distance plus 1 when the parse
/// signatures differ. `question` < 0 means the full-suite probe.
void discriminator_update(DiscriminatorEstimate& est, int question, const Observation& observed,
                          ResponseOracle& oracle, const DialogParams& p);

/// Advance every candidate's severities through a posed question.
void advance_candidates(DiscriminatorEstimate& est, const Question& q, Emotion e,
                        const DialogParams& p);

void recompute_mean(DiscriminatorEstimate& est, const QuestionGraph& g);

// ---- selection and transitions ---------------------------------------------------

struct QuestionScore {
  int question = 0;
  double predicted_distance = 0.0;  // PD
  double gap = 0.0;
  double log_prior = 0.0;
  double cost = 0.0;
};

/// Cost of every question under the estimate.
std::vector<QuestionScore> score_questions(const DiscriminatorEstimate& est,
                                           const TransitionMatrix& transitions,
                                           std::optional<Target> previous, Emotion e,
                                           ResponseOracle& oracle, const DialogParams& p);

/// Index of the lowest cost; near-equal costs (relative 1e-12) go to the lower id.
int argmin_cost(const std::vector<QuestionScore>& scores);

int select_question(const DiscriminatorEstimate& est, const TransitionMatrix& transitions,
                    std::optional<Target> previous, Emotion e, ResponseOracle& oracle,
                    const DialogParams& p);

/// Count the step prev -> next with weight 1, plus 0.25 from every earlier
/// distinct state in `history` whose type does not come after next's type.
void update_transitions(TransitionMatrix& m, const std::vector<Target>& history, const Target& next);

// ---- run -------------------------------------------------------------------------

struct DialogStep {
  int r = 0;
  int question = 0;
  Target target;
  LinkKind link = LinkKind::Synonym;
  ResponseVector expected;
  ResponseVector observed;
  std::string parse_signature;  // observed
  double difference = 0.0;
  std::optional<double> improvement;  // from r = 2
  std::array<std::vector<ConceptId>, 3> unresolved;  // per component, true severities
  bool shrinkage_holds = true;
  int epsilon_prime = 0;
  std::optional<int> epsilon;
  SeverityVector e_delta{};
  double cost = 0.0;
};

struct ConvergenceReport {
  bool converged = false;
  std::string reason;  // "resolved", "stable" or "max-iteration"
  int iterations = 0;
  bool shrinkage_held = true;
  std::vector<std::array<int, 3>> unresolved_sizes;  // per iteration, per component
  std::optional<Target> diagnosis;
};

struct DialogTranscript {
  std::string exercise;
  std::uint64_t seed = 0;
  Observation initial_observed;
  std::vector<DialogStep> steps;
  ConvergenceReport report;
  TransitionMatrix transitions{3 * kConceptCount, 1.0};
};

DialogTranscript run_dialog(SimulatedStudent student, ResponseOracle& oracle,
                            const DialogParams& p = {},
                            TransitionMatrix transitions = TransitionMatrix(3 * kConceptCount, 1.0));

}  // namespace cdiag
