// Student Learning Aptitude: knowledge-tracing recall, logistic adjustment,
// causal products, trace capacity, activity transitions and persistence.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdiag/concept.hpp"
#include "cdiag/profile.hpp"

namespace cdiag {

enum class Emotion { Neutral, Anger, Boredom, Disgust, Fear, Happy, Sad };

inline constexpr int kEmotionCount = 7;

std::string_view emotion_name(Emotion e);
std::optional<Emotion> emotion_from_name(std::string_view s);

enum class Activity { FindDifferences, IdentifyAdjustments, PredictResults, ChangeConcepts };

inline constexpr int kActivityCount = 4;

std::string_view activity_name(Activity a);

struct SlaParams {
  double prior = 0.3;
  double learn_rate = 0.2;
  double slip = 0.1;
  double guess = 0.2;
  // indexed by Emotion
  std::array<double, kEmotionCount> emotion_factor = {1.0, 0.7, 0.8, 0.7, 0.7, 1.0, 0.8};
  // logistic blend per DSim bucket (high >= high_cut, low < low_cut)
  double high_cut = 0.75, low_cut = 0.4;
  std::array<double, 3> bias = {-1.0, -1.5, -2.0};  // high, mid, low
  double w_recall = 2.0, w_dsim = 1.5, w_imp = 1.5;
  double smoothing = 1.0;
  double psi_w = 0.1, psi_tau = 300.0;

  /// Multiplier in [0, 1] from emotion and a social share in [0, 1].
  double modifier(Emotion e, double social) const;
};

/// Row-stochastic matrix estimated from transition counts with additive smoothing.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int n = kActivityCount, double smoothing = 1.0);

  int size() const { return n_; }
  double smoothing() const { return smoothing_; }
  void observe(int from, int to, double weight = 1.0);
  double p(int from, int to) const;
  std::vector<double> row(int from) const;
  const std::vector<double>& counts() const { return counts_; }
  void set_counts(std::vector<double> c);

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  int n_;
  double smoothing_;
  std::vector<double> counts_;  // n x n, row major
};

struct RecallObservation {
  std::set<ConceptId> concepts;           // ConcS
  std::map<ConceptId, int> errors;        // ErrS: recall errors per concept
  int attempts = 1;                       // NrAtt
  Emotion emotion = Emotion::Neutral;
  double social = 1.0;
};

struct AdjustmentObservation {
  std::string exercise;                   // Prob
  std::set<ConceptId> concepts;           // SetCon
  double dsim = 0.0;
  double imp = 0.0;
  Emotion emotion = Emotion::Neutral;
  double social = 1.0;
  std::vector<Activity> activities;       // observed activity sequence
};

struct TraceDiscoveryEvent {
  std::string exercise;
  std::string signature;                  // New
  std::vector<std::string> found;         // Found
  double new_sim = 0.0;                   // NewSim
  double cog_eff = 0.0;                   // seconds
  Emotion emotion = Emotion::Neutral;
  double social = 1.0;
};

struct LogEntry {
  std::string kind;
  std::string payload;  // compact JSON

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct SlaRecord {
  static constexpr int kSchemaVersion = 1;

  std::string student_id;
  std::map<ConceptId, double> known;              // P(known) per concept
  std::map<std::string, double> adjustment;       // last prediction per exercise
  std::map<std::string, double> causal;           // per tracked variable
  std::map<std::string, double> psi;              // trace capacity per exercise
  TransitionMatrix activities{kActivityCount, 1.0};
  TransitionMatrix questions{3 * kConceptCount, 1.0};
  MisunderstandingProfile profile;
  std::map<std::string, int> error_types;         // category -> count
  std::array<int, kEmotionCount> emotions{};      // observation counts
  double social_sum = 0.0;
  int social_count = 0;
  std::vector<LogEntry> log;

  double known_or(ConceptId c, double prior) const;

  friend bool operator==(const SlaRecord&, const SlaRecord&) = default;
};

/// A fresh record; its priors come from `params` when concepts are touched.
SlaRecord empty_record(const std::string& student_id);

struct RecallResult {
  std::map<ConceptId, double> known;  // updated P(known)
  double predicted = 0.0;             // mean P(correct recall) over ConcS
};

/// Knowledge-tracing update for every concept in ConcS.
RecallResult update_recall(SlaRecord& sla, const RecallObservation& obs, const SlaParams& p = {});

/// P(correct) for a concept from its P(known).
double recall_probability(double known, const SlaParams& p = {});

/// Logistic blend prediction without touching the record.
double predict_adjustment(const SlaRecord& sla, const AdjustmentObservation& obs,
                          const SlaParams& p = {});

/// Throws std::invalid_argument on empty SetCon.
double update_adjustment(SlaRecord& sla, const AdjustmentObservation& obs, const SlaParams& p = {});

/// Product of factor * psi_factor; factors are clamped to [0, 1].
double causal_product(const std::vector<double>& factors, double psi_factor);

/// Ψ in [0, 1] mapped to its capacity factor 0.5 + 0.5 Ψ.
double psi_factor(double psi);

/// Block evidence keyed by block name ("C2", ...); missing blocks use the prior.
/// `blocks_of` lists the blocks of each tracked variable.
std::map<std::string, double> update_causal(
    SlaRecord& sla, const std::map<std::string, double>& block_evidence, double psi,
    const std::map<std::string, std::vector<std::string>>& blocks_of, const SlaParams& p = {});

/// Default tracked variables of the pattern exercise, each over C2, C3, C4.
std::map<std::string, std::vector<std::string>> default_causal_blocks();

struct CapacityUpdate {
  double delta = 0.0;
  double psi = 0.0;
};

double capacity_delta(const TraceDiscoveryEvent& ev, const SlaParams& p = {});
CapacityUpdate update_trace_capacity(SlaRecord& sla, const TraceDiscoveryEvent& ev,
                                     const SlaParams& p = {});

/// Sensed affect: one labeled emotion event, one social share in [0, 1].
void record_emotion(SlaRecord& sla, Emotion e, double confidence, std::int64_t timestamp);
void record_social(SlaRecord& sla, double share, std::int64_t timestamp);
/// Most frequent observed emotion (neutral when none; ties to the lower label).
Emotion dominant_emotion(const SlaRecord& sla);
/// Mean social share, 1 when nothing was observed.
double social_share(const SlaRecord& sla);

/// Add a classified error to the record's profile and histogram.
void record_error(SlaRecord& sla, ConceptId c, Component k, const std::string& category,
                  double severity_delta);

// ---- persistence -------------------------------------------------------------

class SchemaViolation : public std::runtime_error {
 public:
  SchemaViolation(const std::string& field, const std::string& what)
      : std::runtime_error("schema violation at '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Canonical JSON text (sorted keys, shortest round-trip doubles).
std::string to_json_text(const SlaRecord& r);
/// Throws SchemaViolation naming the offending field.
SlaRecord from_json_text(const std::string& text);

/// One JSON document per student under a directory; updates to one student
/// are serialized.
class SlaStore {
 public:
  explicit SlaStore(std::string dir);

  const std::string& dir() const { return dir_; }
  std::string path_for(const std::string& student_id) const;
  void save(const SlaRecord& r);
  SlaRecord load(const std::string& student_id) const;
  std::vector<std::string> students() const;

  /// Load, apply `f`, save, with the student's lock held.
  template <class F>
  SlaRecord update(const std::string& student_id, F&& f) {
    std::lock_guard<std::mutex> lock(mutex_for(student_id));
    SlaRecord r = load(student_id);
    f(r);
    save(r);
    return r;
  }

 private:
  std::mutex& mutex_for(const std::string& id);

  std::string dir_;
  std::mutex map_mutex_;
  std::map<std::string, std::mutex> locks_;
};

struct CohortReport {
  int students = 0;
  std::map<ConceptId, double> mean_recall;  // mean P(known) over students tracking it
  std::map<std::string, int> error_types;
};

CohortReport cohort_report(const std::vector<SlaRecord>& records);

}  // namespace cdiag
