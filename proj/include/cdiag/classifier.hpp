// Misconception categories per mismatch, adjustment error scores and
// modification-plan assessment.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cdiag/matcher.hpp"
#include "cdiag/profile.hpp"
#include "cdiag/sla.hpp"

namespace cdiag {

enum class MisconceptionCategory {
  IncorrectRecall,
  IncorrectExtension,
  IncorrectModification,
  IncorrectSequence,
  StuckAtStart,
  BackgroundGap,
};

inline constexpr int kCategoryCount = 6;

const char* category_name(MisconceptionCategory c);
std::optional<MisconceptionCategory> category_from_name(std::string_view s);

/// Profile component a category charges: sequence counts against
/// modification, stuck-at-start and background gaps against recall.
Component component_of(MisconceptionCategory c);

struct ClassifierConfig {
  double severity_increment = 0.25;
  std::vector<std::string> prerequisites = {"ascii-codes", "format-descriptors",
                                            "binary-representation"};
  /// A main with at most this many executable statements (declarations and
  /// return excluded) counts as near-empty.
  int stuck_statement_limit = 0;
  SlaParams sla;
};

/// Index 0..2 = recall, extension, modification. Ties resolve to the lower
/// index, so scaling every entry by one positive constant never changes it.
int argmax_likelihood(const std::array<double, 3>& scores);

/// Error likelihood per component from the student model, normalized to sum
/// to one; uniform when the record carries no evidence for the concept.
std::array<double, 3> model_likelihoods(const SlaRecord& sla, ConceptId c,
                                        const std::string& exercise, const SlaParams& p = {});

struct Classification {
  int mismatch_id = 0;
  MisconceptionCategory category = MisconceptionCategory::IncorrectRecall;
  ConceptId concept_id = ConceptId::LoopControl;
  Component component = Component::Recall;
  double severity_delta = 0.0;
  std::array<double, 3> scores{};  // model likelihood x structural evidence
  std::vector<std::string> evidence;
};

struct ClassifyContext {
  const Ast* student = nullptr;
  const Ast* reference = nullptr;
  const Diagnosis* diagnosis = nullptr;
  std::string exercise;
  std::vector<std::string> prerequisites;  // topics the exercise builds on
};

Classification classify(const Mismatch& m, const SlaRecord& sla, const ClassifyContext& ctx,
                        const ClassifierConfig& cfg = {});

/// A submission that does not parse: one recall classification on the first
/// error's concept (or stuck-at-start for an effectively empty text).
Classification classify_parse_failure(const std::vector<ParseError>& errors,
                                      const std::string& source, const SlaRecord& sla,
                                      const ClassifierConfig& cfg = {});

/// Apply a classification's severity to a profile.
void apply_classification(MisunderstandingProfile& profile, const Classification& c);

// ---- adjustment error score ----------------------------------------------------

struct AdjustmentPair {
  int mismatch_id = 0;
  std::string performed;  // student fragment
  std::string expected;   // reference fragment
  double gap = 0.0;       // squared response distance over the probes
};

struct AdjustmentErrorScore {
  ConceptId concept_id = ConceptId::LoopControl;
  double score = 0.0;
  std::vector<AdjustmentPair> pairs;
};

/// Sum over the concept's mismatches of the squared response distance between
/// the student's and the reference's fragment run from the same state. Edits
/// without a fragment on both sides fall back to the whole-program response.
AdjustmentErrorScore score_adjustment(ConceptId c, const std::vector<Mismatch>& mismatches,
                                      const Ast& student, const Ast& reference,
                                      const Diagnosis& diagnosis,
                                      const std::vector<TestCase>& tests, int probes = 6);

// ---- modification plan ---------------------------------------------------------

enum class PlanStep {
  IdentifySituations,
  IdentifyVariables,
  InitializeVariables,
  FindPlacesToModify,
  ModifyVariables,
};

inline constexpr int kPlanStepCount = 5;

const char* plan_step_name(PlanStep s);

struct PlanStepStatus {
  PlanStep step = PlanStep::IdentifySituations;
  bool complete = true;
  std::vector<std::string> delta;  // evidence for an incomplete step
};

struct ModificationPlan {
  std::array<PlanStepStatus, kPlanStepCount> steps;
  std::vector<std::string> background;

  /// No complete step follows an incomplete one.
  bool precedence_holds() const;
};

ModificationPlan assess_modification_plan(const Diagnosis& diagnosis, const Ast& student,
                                          const Ast& reference,
                                          const std::vector<std::string>& background = {});

}  // namespace cdiag
