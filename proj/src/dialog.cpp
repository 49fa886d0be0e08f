#include "cdiag/dialog.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cdiag/interpreter.hpp"
#include "cdiag/parser.hpp"

namespace cdiag {

namespace {

/// Apply catalog faults one after another, highest reference node first. Each
/// site is found again in the partly mutated tree by operator, variant and
/// description; a fault whose site another fault destroyed is left out.
Ast apply_faults(const Ast& reference, const QuestionGraph& g, std::vector<int> faults,
                 bool* broken) {
  std::sort(faults.begin(), faults.end(), [&](int a, int b) {
    int na = g.catalog[static_cast<size_t>(a)].site.node_id;
    int nb = g.catalog[static_cast<size_t>(b)].site.node_id;
    return na != nb ? na > nb : a < b;
  });
  Ast cur = reference;
  *broken = false;
  for (int i : faults) {
    const CatalogEntry& c = g.catalog[static_cast<size_t>(i)];
    for (const auto& s : mutation_sites(cur, c.site.op)) {
      if (s.variant != c.site.variant || s.description != c.site.description) continue;
      cur = mutated_ast(cur, s);
      *broken = *broken || c.breaks_parse;
      break;
    }
  }
  return cur;
}

ExecOptions quiet() {
  ExecOptions opt;
  opt.record_steps = false;
  return opt;
}

std::vector<int> restrict_to(const std::vector<int>& faults, const QuestionGraph& g, ConceptId c) {
  std::vector<int> out;
  for (int i : faults)
    if (g.catalog[static_cast<size_t>(i)].target.concept_id == c) out.push_back(i);
  return out;
}

}  // namespace

// ---- oracle ----------------------------------------------------------------------

ResponseOracle::ResponseOracle(const Exercise& ex, const QuestionGraph& g) : ex_(ex), g_(g) {
  ref_full_ = run_suite_serial(ex.reference, ex.tests, quiet());
  for (const auto& q : g.questions) ref_probe_.push_back(run_suite_serial(ex.reference, q.probes, quiet()));
}

ResponseVector ResponseOracle::run(const std::vector<int>& faults, const std::vector<TestCase>& tests,
                                   const std::vector<ExecutionTrace>& ref) {
  if (faults.empty()) return all_match_response(tests.size());
  bool broken = false;
  Ast prog = apply_faults(ex_.reference, g_, faults, &broken);
  if (broken) {
    ResponseVector r;
    r.codes.assign(tests.size(), OutcomeCode::Crash);
    r.divergence.assign(tests.size(), 0.0);
    return r;
  }
  return compare_runs(run_suite_serial(prog, tests, quiet()), ref, identity_mapping(prog, ex_.reference));
}

const ResponseVector& ResponseOracle::full(const std::vector<int>& faults) {
  {
    std::lock_guard lock(mu_);
    auto it = full_cache_.find(faults);
    if (it != full_cache_.end()) return *it->second;
  }
  auto r = std::make_unique<ResponseVector>(run(faults, ex_.tests, ref_full_));
  std::lock_guard lock(mu_);
  auto [it, fresh] = full_cache_.emplace(faults, std::move(r));
  return *it->second;
}

const ResponseVector& ResponseOracle::on_question(const std::vector<int>& faults, int question) {
  const Question& q = g_.questions.at(static_cast<size_t>(question));
  auto key = std::make_pair(restrict_to(faults, g_, q.target.concept_id), question);
  {
    std::lock_guard lock(mu_);
    auto it = q_cache_.find(key);
    if (it != q_cache_.end()) return *it->second;
  }
  auto r = std::make_unique<ResponseVector>(
      run(key.first, q.probes, ref_probe_[static_cast<size_t>(question)]));
  std::lock_guard lock(mu_);
  auto [it, fresh] = q_cache_.emplace(std::move(key), std::move(r));
  return *it->second;
}

std::string ResponseOracle::program(const std::vector<int>& faults) const {
  bool broken = false;
  return pretty_print(apply_faults(ex_.reference, g_, faults, &broken));
}

const std::string& ResponseOracle::parse_signature(const std::vector<int>& faults) {
  {
    std::lock_guard lock(mu_);
    auto it = sig_cache_.find(faults);
    if (it != sig_cache_.end()) return *it->second;
  }
  auto sig = std::make_unique<std::string>();
  bool broken = false;
  Ast prog = apply_faults(ex_.reference, g_, faults, &broken);
  if (broken) {
    ParseResult pr = parse(pretty_print(prog));
    if (!pr.ok()) {
      const ParseError& e = pr.errors.front();
      *sig = std::to_string(e.span.start_line) + ":" + std::to_string(e.span.start_col) + " " + e.message;
    }
  }
  std::lock_guard lock(mu_);
  auto [it, fresh] = sig_cache_.emplace(faults, std::move(sig));
  return *it->second;
}

const std::string& ResponseOracle::parse_signature(const std::vector<int>& faults, int question) {
  return parse_signature(restrict_to(faults, g_, g_.questions.at(static_cast<size_t>(question)).target.concept_id));
}

// ---- student ---------------------------------------------------------------------

SeverityVector severities_of(const MisunderstandingProfile& p) {
  SeverityVector v{};
  for (const auto& [c, s] : p.entries)
    for (int k = 0; k < kComponentCount; ++k)
      v[static_cast<size_t>(Target{c, static_cast<Component>(k)}.state())] = s[static_cast<size_t>(k)];
  return v;
}

MisunderstandingProfile profile_of(const SeverityVector& v) {
  MisunderstandingProfile p;
  for (int s = 0; s < static_cast<int>(v.size()); ++s)
    if (v[static_cast<size_t>(s)] > 0.0) {
      Target t = target_from_state(s);
      p.set(t.concept_id, t.type, v[static_cast<size_t>(s)]);
    }
  return p;
}

std::vector<int> active_faults(const SeverityVector& s, const QuestionGraph& g, double threshold) {
  std::vector<int> out;
  for (size_t i = 0; i < g.catalog.size(); ++i)
    if (s[static_cast<size_t>(g.catalog[i].target.state())] > threshold) out.push_back(static_cast<int>(i));
  return out;
}

void learn_from(SeverityVector& s, const Question& q, double learn_rate, Emotion e,
                const DialogParams& p) {
  double step = learn_rate * p.link_factor[static_cast<size_t>(q.link)] *
                p.sla.emotion_factor[static_cast<size_t>(e)];
  double& v = s[static_cast<size_t>(q.target.state())];
  v = std::clamp(v - step, 0.0, 1.0);
}

StudentAnswer student_respond(SimulatedStudent& st, const Question& q, ResponseOracle& oracle,
                              const DialogParams& p) {
  std::vector<int> faults = active_faults(st.delta, oracle.graph(), p.threshold);
  StudentAnswer a;
  a.observed.response = oracle.on_question(faults, q.id);
  a.observed.parse_signature = oracle.parse_signature(faults, q.id);
  a.program = oracle.program(restrict_to(faults, oracle.graph(), q.target.concept_id));
  learn_from(st.delta, q, st.learn_rate, st.emotion, p);
  return a;
}

// ---- discriminator ---------------------------------------------------------------

std::map<Target, double> DiscriminatorEstimate::initial_marginal(const QuestionGraph& g) const {
  std::map<Target, double> m;
  for (const auto& c : g.catalog) m[c.target] = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i)
    for (int f : candidates[i].initial) m[g.catalog[static_cast<size_t>(f)].target] += weights[i];
  return m;
}

std::optional<Target> DiscriminatorEstimate::diagnosis(const QuestionGraph& g) const {
  double none = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i].initial.empty()) none += weights[i];
  std::optional<Target> best;
  double best_mass = none;
  for (const auto& [t, mass] : initial_marginal(g))
    if (mass > best_mass) best = t, best_mass = mass;
  return best;
}

std::optional<Target> DiscriminatorEstimate::estimate_argmax(const QuestionGraph& g,
                                                             double threshold) const {
  std::optional<Target> best;
  double best_v = threshold;
  for (const auto& c : g.catalog) {
    double v = e_delta[static_cast<size_t>(c.target.state())];
    if (v > best_v) best = c.target, best_v = v;
  }
  return best;
}

DiscriminatorEstimate initial_estimate(const QuestionGraph& g, const DialogParams& p) {
  std::vector<std::vector<int>> sets{{}};
  int n = static_cast<int>(g.catalog.size());
  for (int i = 0; i < n; ++i) sets.push_back({i});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) sets.push_back({i, j});
  DiscriminatorEstimate est;
  for (const auto& s : sets)
    for (double lr : p.learn_rates) {
      Candidate c;
      c.initial = s;
      c.learn_rate = lr;
      for (int f : s) c.current[static_cast<size_t>(g.catalog[static_cast<size_t>(f)].target.state())] = 1.0;
      est.candidates.push_back(std::move(c));
    }
  est.weights.assign(est.candidates.size(), 1.0 / static_cast<double>(est.candidates.size()));
  recompute_mean(est, g);
  return est;
}

void discriminator_update(DiscriminatorEstimate& est, int question, const Observation& observed,
                          ResponseOracle& oracle, const DialogParams& p) {
  const QuestionGraph& g = oracle.graph();
  double sum = 0.0;
  for (size_t i = 0; i < est.candidates.size(); ++i) {
    if (est.weights[i] == 0.0) continue;
    std::vector<int> faults = active_faults(est.candidates[i].current, g, p.threshold);
    const ResponseVector& pred = question < 0 ? oracle.full(faults) : oracle.on_question(faults, question);
    const std::string& sig = question < 0 ? oracle.parse_signature(faults) : oracle.parse_signature(faults, question);
    double d = response_distance(pred, observed.response) + (sig == observed.parse_signature ? 0.0 : 1.0);
    est.weights[i] *= std::exp(-d / p.lambda);
    sum += est.weights[i];
  }
  if (sum > 0.0 && std::isfinite(sum)) {
    for (double& w : est.weights) w /= sum;
  } else {
    ++est.uniform_fallbacks;
    est.weights.assign(est.candidates.size(), 1.0 / static_cast<double>(est.candidates.size()));
  }
}

void advance_candidates(DiscriminatorEstimate& est, const Question& q, Emotion e,
                        const DialogParams& p) {
  for (auto& c : est.candidates) learn_from(c.current, q, c.learn_rate, e, p);
}

void recompute_mean(DiscriminatorEstimate& est, const QuestionGraph&) {
  est.e_delta.fill(0.0);
  for (size_t i = 0; i < est.candidates.size(); ++i)
    for (size_t s = 0; s < est.e_delta.size(); ++s) est.e_delta[s] += est.weights[i] * est.candidates[i].current[s];
}

// ---- selection -------------------------------------------------------------------

std::vector<QuestionScore> score_questions(const DiscriminatorEstimate& est,
                                           const TransitionMatrix& transitions,
                                           std::optional<Target> previous, Emotion e,
                                           ResponseOracle& oracle, const DialogParams& p) {
  const QuestionGraph& g = oracle.graph();
  const size_t n = oracle.exercise().tests.size();
  const ResponseVector clean = all_match_response(n);
  std::vector<QuestionScore> out;
  for (const auto& q : g.questions) {
    QuestionScore s;
    s.question = q.id;
    for (size_t i = 0; i < est.candidates.size(); ++i) {
      if (est.weights[i] < 1e-15) continue;
      SeverityVector after = est.candidates[i].current;
      learn_from(after, q, est.candidates[i].learn_rate, e, p);
      s.predicted_distance +=
          est.weights[i] * response_distance(oracle.full(active_faults(after, g, p.threshold)), clean);
    }
    s.gap = est.e_delta[static_cast<size_t>(q.target.state())];
    s.log_prior = previous ? std::log(transitions.p(previous->state(), q.target.state()))
                           : -std::log(static_cast<double>(transitions.size()));
    s.cost = p.alpha * s.predicted_distance + p.beta / (s.gap + 1.0) - (p.alpha + p.beta) * s.log_prior;
    out.push_back(s);
  }
  return out;
}

int argmin_cost(const std::vector<QuestionScore>& scores) {
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    double a = scores[i].cost, b = scores[static_cast<size_t>(best)].cost;
    double tol = 1e-12 * std::max(std::abs(a), std::abs(b));
    if (a < b - tol) best = static_cast<int>(i);
  }
  return best;
}

int select_question(const DiscriminatorEstimate& est, const TransitionMatrix& transitions,
                    std::optional<Target> previous, Emotion e, ResponseOracle& oracle,
                    const DialogParams& p) {
  auto scores = score_questions(est, transitions, previous, e, oracle, p);
  return scores[static_cast<size_t>(argmin_cost(scores))].question;
}

void update_transitions(TransitionMatrix& m, const std::vector<Target>& history, const Target& next) {
  if (history.empty()) return;
  m.observe(history.back().state(), next.state(), 1.0);
  std::set<int> seen{history.back().state()};
  for (size_t i = history.size() - 1; i-- > 0;) {
    const Target& t = history[i];
    if (!seen.insert(t.state()).second) continue;
    if (static_cast<int>(t.type) <= static_cast<int>(next.type)) m.observe(t.state(), next.state(), 0.25);
  }
}

// ---- run -------------------------------------------------------------------------

namespace {

std::array<std::vector<ConceptId>, 3> unresolved_of(const SeverityVector& s, double resolved) {
  std::array<std::vector<ConceptId>, 3> out;
  for (int k = 0; k < kComponentCount; ++k)
    for (ConceptId c : kAllConcepts)
      if (s[static_cast<size_t>(Target{c, static_cast<Component>(k)}.state())] >= resolved)
        out[static_cast<size_t>(k)].push_back(c);
  return out;
}

std::optional<Target> true_argmax(const SeverityVector& s, double resolved) {
  std::optional<Target> best;
  double v = resolved;
  for (int i = 0; i < static_cast<int>(s.size()); ++i)
    if (s[static_cast<size_t>(i)] >= v && (!best || s[static_cast<size_t>(i)] > v))
      best = target_from_state(i), v = s[static_cast<size_t>(i)];
  return best;
}

std::array<int, 3> sizes(const std::array<std::vector<ConceptId>, 3>& u) {
  return {static_cast<int>(u[0].size()), static_cast<int>(u[1].size()), static_cast<int>(u[2].size())};
}

}  // namespace

DialogTranscript run_dialog(SimulatedStudent student, ResponseOracle& oracle, const DialogParams& p,
                            TransitionMatrix transitions) {
  const QuestionGraph& g = oracle.graph();
  DialogTranscript tr;
  tr.exercise = oracle.exercise().id;
  tr.seed = student.seed;
  tr.transitions = std::move(transitions);

  DiscriminatorEstimate est = initial_estimate(g, p);
  std::vector<int> initial = active_faults(student.delta, g, p.threshold);
  tr.initial_observed = {oracle.full(initial), oracle.parse_signature(initial)};
  discriminator_update(est, -1, tr.initial_observed, oracle, p);
  recompute_mean(est, g);

  auto unresolved = unresolved_of(student.delta, p.resolved);
  tr.report.unresolved_sizes.push_back(sizes(unresolved));
  auto all_resolved = [&] {
    return std::all_of(student.delta.begin(), student.delta.end(), [&](double v) { return v < p.resolved; });
  };

  std::vector<Target> history;
  int stable = 0;
  if (all_resolved()) {
    tr.report.converged = true;
    tr.report.reason = "resolved";
  }
  for (int r = 1; !tr.report.converged && r <= p.max_iteration; ++r) {
    std::optional<Target> prev = history.empty() ? std::nullopt : std::optional(history.back());
    auto scores = score_questions(est, tr.transitions, prev, student.emotion, oracle, p);
    const QuestionScore& chosen = scores[static_cast<size_t>(argmin_cost(scores))];
    const Question& q = g.questions[static_cast<size_t>(chosen.question)];

    DialogStep step;
    step.r = r;
    step.question = q.id;
    step.target = q.target;
    step.link = q.link;
    step.cost = chosen.cost;
    step.expected = oracle.on_question(active_faults(est.e_delta, g, p.threshold), q.id);
    Observation seen = student_respond(student, q, oracle, p).observed;
    step.observed = seen.response;
    step.parse_signature = seen.parse_signature;
    step.difference = response_distance(step.observed, step.expected);
    if (!tr.steps.empty()) step.improvement = response_distance(step.observed, tr.steps.back().observed);

    SeverityVector before = est.e_delta;
    discriminator_update(est, q.id, seen, oracle, p);
    advance_candidates(est, q, student.emotion, p);
    recompute_mean(est, g);
    step.e_delta = est.e_delta;
    update_transitions(tr.transitions, history, q.target);
    history.push_back(q.target);

    auto now = unresolved_of(student.delta, p.resolved);
    for (int k = 0; k < kComponentCount; ++k)
      step.shrinkage_holds = step.shrinkage_holds &&
                             std::includes(unresolved[static_cast<size_t>(k)].begin(),
                                           unresolved[static_cast<size_t>(k)].end(),
                                           now[static_cast<size_t>(k)].begin(),
                                           now[static_cast<size_t>(k)].end());
    step.unresolved = now;
    unresolved = now;
    tr.report.unresolved_sizes.push_back(sizes(now));
    tr.report.shrinkage_held = tr.report.shrinkage_held && step.shrinkage_holds;

    if (auto t = est.estimate_argmax(g, 0.0)) step.epsilon_prime = g.distance(q.id, *t);
    step.epsilon = 0;
    if (auto t = true_argmax(student.delta, p.resolved)) step.epsilon = g.distance(q.id, *t);

    double change = 0.0;
    for (size_t s = 0; s < before.size(); ++s) change = std::max(change, std::abs(est.e_delta[s] - before[s]));
    stable = change < p.stable_eps ? stable + 1 : 0;
    double max_est = *std::max_element(est.e_delta.begin(), est.e_delta.end());
    bool clean = step.observed.all_match();
    tr.steps.push_back(std::move(step));

    if (all_resolved()) {
      tr.report.converged = true;
      tr.report.reason = "resolved";
    } else if (stable >= p.stable_iterations && clean && max_est < p.threshold) {
      tr.report.converged = true;
      tr.report.reason = "stable";
    }
  }
  if (!tr.report.converged) tr.report.reason = "max-iteration";
  tr.report.iterations = static_cast<int>(tr.steps.size());
  tr.report.diagnosis = est.diagnosis(g);
  return tr;
}

}  // namespace cdiag
