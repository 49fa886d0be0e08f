#include "cdiag/sla.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace cdiag {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "neutral", "anger", "boredom", "disgust", "fear", "happy", "sad"};

double clamp01(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void note_affect(SlaRecord& sla, Emotion e, double social) {
  sla.emotions[static_cast<int>(e)]++;
  sla.social_sum += clamp01(social);
  sla.social_count++;
}

nlohmann::json concept_list(const std::set<ConceptId>& cs) {
  auto a = nlohmann::json::array();
  for (auto c : cs) a.push_back(std::string(concept_name(c)));
  return a;
}

}  // namespace

std::string_view emotion_name(Emotion e) { return kEmotionNames[static_cast<int>(e)]; }

std::optional<Emotion> emotion_from_name(std::string_view s) {
  for (int i = 0; i < kEmotionCount; ++i)
    if (kEmotionNames[i] == s) return static_cast<Emotion>(i);
  return std::nullopt;
}

std::string_view activity_name(Activity a) {
  switch (a) {
    case Activity::FindDifferences: return "find-differences";
    case Activity::IdentifyAdjustments: return "identify-adjustments";
    case Activity::PredictResults: return "predict-results";
    case Activity::ChangeConcepts: return "change-concepts";
  }
  return "?";
}

double SlaParams::modifier(Emotion e, double social) const {
  return clamp01(emotion_factor[static_cast<int>(e)]) * (0.5 + 0.5 * clamp01(social));
}

// ---- transition matrix --------------------------------------------------------

TransitionMatrix::TransitionMatrix(int n, double smoothing)
    : n_(n), smoothing_(smoothing > 0 ? smoothing : 1.0),
      counts_(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0) {}

void TransitionMatrix::observe(int from, int to, double weight) {
  if (from < 0 || from >= n_ || to < 0 || to >= n_)
    throw std::out_of_range("transition index out of range");
  if (!(weight >= 0)) throw std::invalid_argument("negative transition weight");
  counts_[static_cast<size_t>(from) * n_ + to] += weight;
}

double TransitionMatrix::p(int from, int to) const {
  double total = 0;
  for (int j = 0; j < n_; ++j) total += counts_[static_cast<size_t>(from) * n_ + j] + smoothing_;
  return (counts_[static_cast<size_t>(from) * n_ + to] + smoothing_) / total;
}

std::vector<double> TransitionMatrix::row(int from) const {
  std::vector<double> r(n_);
  for (int j = 0; j < n_; ++j) r[j] = p(from, j);
  return r;
}

void TransitionMatrix::set_counts(std::vector<double> c) {
  if (c.size() != counts_.size()) throw std::invalid_argument("transition count size mismatch");
  for (double v : c)
    if (!(v >= 0)) throw std::invalid_argument("negative transition count");
  counts_ = std::move(c);
}

// ---- records ------------------------------------------------------------------

double SlaRecord::known_or(ConceptId c, double prior) const {
  auto it = known.find(c);
  return it == known.end() ? prior : it->second;
}

SlaRecord empty_record(const std::string& student_id) {
  SlaRecord r;
  r.student_id = student_id;
  return r;
}

double recall_probability(double known, const SlaParams& p) {
  return clamp01(known * (1.0 - p.slip) + (1.0 - known) * p.guess);
}

RecallResult update_recall(SlaRecord& sla, const RecallObservation& obs, const SlaParams& p) {
  RecallResult out;
  double mod = p.modifier(obs.emotion, obs.social);
  int attempts = std::max(1, obs.attempts);
  double sum = 0;
  for (ConceptId c : obs.concepts) {
    double pl = sla.known_or(c, p.prior);
    auto it = obs.errors.find(c);
    bool correct = it == obs.errors.end() || it->second <= 0;
    double num, den;
    if (correct) {
      num = pl * (1.0 - p.slip);
      den = num + (1.0 - pl) * p.guess;
    } else {
      num = pl * p.slip;
      den = num + (1.0 - pl) * (1.0 - p.guess);
    }
    double post = den > 0 ? num / den : pl;  // contradicting certain evidence: keep
    // repeated fix attempts slow down learning from this observation
    double rate = clamp01(p.learn_rate * mod / (correct ? 1.0 : attempts));
    double next = clamp01(post + (1.0 - post) * rate);
    sla.known[c] = next;
    out.known[c] = next;
    sum += recall_probability(next, p);
  }
  out.predicted = obs.concepts.empty() ? 0.0 : clamp01(sum / obs.concepts.size());
  note_affect(sla, obs.emotion, obs.social);
  nlohmann::json j;
  j["concepts"] = concept_list(obs.concepts);
  int errs = 0;
  for (auto& [c, n] : obs.errors) errs += n;
  j["errors"] = errs;
  j["attempts"] = attempts;
  j["emotion"] = std::string(emotion_name(obs.emotion));
  sla.log.push_back({"recall", j.dump()});
  return out;
}

double predict_adjustment(const SlaRecord& sla, const AdjustmentObservation& obs,
                          const SlaParams& p) {
  if (obs.concepts.empty()) throw std::invalid_argument("adjustment observation has empty SetCon");
  double r = 0;
  for (ConceptId c : obs.concepts) r += recall_probability(sla.known_or(c, p.prior), p);
  r /= static_cast<double>(obs.concepts.size());
  double dsim = clamp01(obs.dsim), imp = clamp01(obs.imp);
  int bucket = dsim >= p.high_cut ? 0 : (dsim < p.low_cut ? 2 : 1);
  double z = p.bias[bucket] + p.w_recall * r + p.w_dsim * dsim + p.w_imp * imp;
  return clamp01(sigmoid(z) * p.modifier(obs.emotion, obs.social));
}

double update_adjustment(SlaRecord& sla, const AdjustmentObservation& obs, const SlaParams& p) {
  double pred = predict_adjustment(sla, obs, p);
  sla.adjustment[obs.exercise] = pred;
  for (size_t i = 1; i < obs.activities.size(); ++i)
    sla.activities.observe(static_cast<int>(obs.activities[i - 1]),
                           static_cast<int>(obs.activities[i]));
  note_affect(sla, obs.emotion, obs.social);
  nlohmann::json j;
  j["exercise"] = obs.exercise;
  j["concepts"] = concept_list(obs.concepts);
  j["dsim"] = obs.dsim;
  j["imp"] = obs.imp;
  j["prediction"] = pred;
  sla.log.push_back({"adjustment", j.dump()});
  return pred;
}

double psi_factor(double psi) { return 0.5 + 0.5 * clamp01(psi); }

double causal_product(const std::vector<double>& factors, double psi_f) {
  double prod = 1.0;
  double pf = clamp01(psi_f);
  for (double f : factors) prod *= clamp01(f) * pf;
  return clamp01(prod);
}

std::map<std::string, std::vector<std::string>> default_causal_blocks() {
  return {{"count", {"C2", "C3", "C4"}},
          {"first", {"C2", "C3", "C4"}},
          {"second", {"C2", "C3", "C4"}}};
}

std::map<std::string, double> update_causal(
    SlaRecord& sla, const std::map<std::string, double>& block_evidence, double psi,
    const std::map<std::string, std::vector<std::string>>& blocks_of, const SlaParams& p) {
  std::map<std::string, double> out;
  for (const auto& [var, blocks] : blocks_of) {
    std::vector<double> f;
    for (const auto& b : blocks) {
      auto it = block_evidence.find(b);
      f.push_back(it == block_evidence.end() ? p.prior : it->second);
    }
    double c = causal_product(f, psi_factor(psi));
    sla.causal[var] = c;
    out[var] = c;
  }
  nlohmann::json j;
  j["psi"] = psi;
  j["causal"] = out;
  sla.log.push_back({"causal", j.dump()});
  return out;
}

double capacity_delta(const TraceDiscoveryEvent& ev, const SlaParams& p) {
  double novelty = 1.0 - clamp01(ev.new_sim);
  double effort = 1.0 + std::max(0.0, ev.cog_eff) / p.psi_tau;
  return p.psi_w * novelty / effort * p.modifier(ev.emotion, ev.social);
}

CapacityUpdate update_trace_capacity(SlaRecord& sla, const TraceDiscoveryEvent& ev,
                                     const SlaParams& p) {
  CapacityUpdate u;
  u.delta = capacity_delta(ev, p);
  double& psi = sla.psi[ev.exercise];
  psi = clamp01(psi + u.delta);
  u.psi = psi;
  note_affect(sla, ev.emotion, ev.social);
  nlohmann::json j;
  j["exercise"] = ev.exercise;
  j["signature"] = ev.signature;
  j["new_sim"] = ev.new_sim;
  j["cog_eff"] = ev.cog_eff;
  j["delta"] = u.delta;
  sla.log.push_back({"trace", j.dump()});
  return u;
}

void record_emotion(SlaRecord& sla, Emotion e, double confidence, std::int64_t timestamp) {
  sla.emotions[static_cast<int>(e)]++;
  nlohmann::json j;
  j["label"] = std::string(emotion_name(e));
  j["confidence"] = clamp01(confidence);
  j["timestamp"] = timestamp;
  sla.log.push_back({"emotion", j.dump()});
}

void record_social(SlaRecord& sla, double share, std::int64_t timestamp) {
  sla.social_sum += clamp01(share);
  sla.social_count++;
  nlohmann::json j;
  j["share"] = clamp01(share);
  j["timestamp"] = timestamp;
  sla.log.push_back({"social", j.dump()});
}

Emotion dominant_emotion(const SlaRecord& sla) {
  int best = 0;
  for (int i = 1; i < kEmotionCount; ++i)
    if (sla.emotions[i] > sla.emotions[best]) best = i;
  return static_cast<Emotion>(best);
}

double social_share(const SlaRecord& sla) {
  return sla.social_count > 0 ? clamp01(sla.social_sum / sla.social_count) : 1.0;
}

void record_error(SlaRecord& sla, ConceptId c, Component k, const std::string& category,
                  double severity_delta) {
  sla.profile.add(c, k, severity_delta);
  sla.error_types[category]++;
  nlohmann::json j;
  j["concept"] = std::string(concept_name(c));
  j["component"] = std::string(component_name(k));
  j["category"] = category;
  sla.log.push_back({"error", j.dump()});
}

CohortReport cohort_report(const std::vector<SlaRecord>& records) {
  CohortReport rep;
  rep.students = static_cast<int>(records.size());
  std::map<ConceptId, int> n;
  for (const auto& r : records) {
    for (auto& [c, v] : r.known) {
      rep.mean_recall[c] += v;
      n[c]++;
    }
    for (auto& [k, v] : r.error_types) rep.error_types[k] += v;
  }
  for (auto& [c, v] : rep.mean_recall) v /= n[c];
  return rep;
}

}  // namespace cdiag
