#include "cdiag/report_json.hpp"

#include <cmath>
#include <stdexcept>

#include "cdiag/ast_json.hpp"

namespace cdiag {

using nlohmann::json;

json to_json(const ResponseVector& r) {
  json codes = json::array();
  for (auto c : r.codes) codes.push_back(outcome_code_name(c));
  return {{"codes", codes}, {"divergence", r.divergence}, {"all_match", r.all_match()}};
}

json to_json(const VariableMapping& m) {
  json pairs = json::array();
  for (const auto& p : m.pairs) pairs.push_back({{"student", p.student}, {"reference", p.reference}, {"score", p.score}});
  return {{"pairs", pairs}, {"unmatched_student", m.unmatched_student}, {"unmatched_reference", m.unmatched_reference}};
}

json to_json(const Mismatch& m) {
  json j = {{"id", m.id},
            {"kind", mismatch_kind_name(m.kind)},
            {"edit", edit_kind_name(m.edit.kind)},
            {"concept", std::string(concept_name(m.edit.concept_id))},
            {"student_label", m.edit.student_label},
            {"reference_label", m.edit.reference_label},
            {"first_divergent_test", m.first_divergent_test},
            {"divergence_score", m.divergence_score},
            {"execution_order", m.execution_order}};
  j["student_span"] = m.student_span ? to_json(*m.student_span) : json(nullptr);
  j["reference_span"] = m.reference_span ? to_json(*m.reference_span) : json(nullptr);
  return j;
}

json to_json(const Classification& c) {
  return {{"mismatch_id", c.mismatch_id},
          {"category", category_name(c.category)},
          {"concept", std::string(concept_name(c.concept_id))},
          {"component", std::string(component_name(c.component))},
          {"severity_delta", c.severity_delta},
          {"scores", c.scores},
          {"evidence", c.evidence}};
}

json to_json(const ModificationPlan& p) {
  json steps = json::array();
  for (const auto& s : p.steps)
    steps.push_back({{"step", plan_step_name(s.step)}, {"complete", s.complete}, {"delta", s.delta}});
  return {{"steps", steps}, {"background", p.background}, {"precedence_holds", p.precedence_holds()}};
}

json to_json(const MisunderstandingProfile& p) {
  json j = json::object();
  for (const auto& [c, s] : p.entries) j[std::string(concept_name(c))] = {{"r", s[0]}, {"e", s[1]}, {"m", s[2]}};
  return j;
}

json report_json(const SubmissionReport& r) {
  json j = {{"schema_version", kReportSchemaVersion},
            {"exercise", r.exercise},
            {"student_id", r.student_id},
            {"parsed", r.parsed},
            {"correct", r.correct()}};
  json errors = json::array();
  for (const auto& e : r.parse_errors) errors.push_back(to_json(e));
  j["parse_errors"] = errors;
  if (r.diagnosis) {
    j["mapping"] = to_json(r.diagnosis->mapping);
    json ms = json::array();
    for (const auto& m : r.diagnosis->mismatches) ms.push_back(to_json(m));
    j["mismatches"] = ms;
    j["response"] = to_json(r.diagnosis->response);
  } else {
    j["mapping"] = nullptr;
    j["mismatches"] = json::array();
    j["response"] = nullptr;
  }
  json cs = json::array();
  for (const auto& c : r.classifications) cs.push_back(to_json(c));
  j["classifications"] = cs;
  auto primary = r.primary();
  j["primary_category"] = primary ? json(category_name(*primary)) : json(nullptr);
  j["plan"] = r.plan ? to_json(*r.plan) : json(nullptr);
  return j;
}

namespace {

json target_json(const Target& t) {
  return {{"concept", std::string(concept_name(t.concept_id))}, {"type", std::string(component_name(t.type))}};
}

json severities_json(const SeverityVector& v) { return to_json(profile_of(v)); }

}  // namespace

json transcript_json(const DialogTranscript& t, const QuestionGraph& g) {
  json questions = json::array();
  for (const auto& q : g.questions) {
    json edges = json::array();
    for (const auto& e : q.edges) edges.push_back({{"to", e.to}, {"kind", link_kind_name(e.kind)}});
    questions.push_back({{"id", q.id},
                         {"target", target_json(q.target)},
                         {"link", link_kind_name(q.link)},
                         {"prompt", q.prompt},
                         {"probes", static_cast<int>(q.probes.size())},
                         {"edges", edges}});
  }
  json steps = json::array();
  for (const auto& s : t.steps) {
    json unresolved = json::object();
    for (int k = 0; k < kComponentCount; ++k) {
      json cs = json::array();
      for (auto c : s.unresolved[static_cast<size_t>(k)]) cs.push_back(std::string(concept_name(c)));
      unresolved[std::string(component_name(static_cast<Component>(k)))] = cs;
    }
    steps.push_back({{"r", s.r},
                     {"question", s.question},
                     {"target", target_json(s.target)},
                     {"link", link_kind_name(s.link)},
                     {"cost", s.cost},
                     {"expected", to_json(s.expected)},
                     {"observed", to_json(s.observed)},
                     {"parse_signature", s.parse_signature},
                     {"difference", s.difference},
                     {"improvement", s.improvement ? json(*s.improvement) : json(nullptr)},
                     {"unresolved", unresolved},
                     {"shrinkage_holds", s.shrinkage_holds},
                     {"epsilon_prime", s.epsilon_prime},
                     {"epsilon", s.epsilon ? json(*s.epsilon) : json(nullptr)},
                     {"e_delta", severities_json(s.e_delta)}});
  }
  json sizes = json::array();
  for (const auto& s : t.report.unresolved_sizes) sizes.push_back({{"r", s[0]}, {"e", s[1]}, {"m", s[2]}});
  return {{"schema_version", kReportSchemaVersion},
          {"exercise", t.exercise},
          {"seed", t.seed},
          {"questions", questions},
          {"initial_observed", to_json(t.initial_observed.response)},
          {"initial_parse_signature", t.initial_observed.parse_signature},
          {"steps", steps},
          {"report",
           {{"converged", t.report.converged},
            {"reason", t.report.reason},
            {"iterations", t.report.iterations},
            {"shrinkage_held", t.report.shrinkage_held},
            {"unresolved_sizes", sizes},
            {"diagnosis", t.report.diagnosis ? target_json(*t.report.diagnosis) : json(nullptr)}}},
          {"transitions", {{"size", t.transitions.size()}, {"counts", t.transitions.counts()}}}};
}

std::vector<json> trace_lines(const ExecutionTrace& t) {
  std::vector<json> out;
  auto values = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
    return a;
  };
  for (size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& s = t.steps[i];
    json vars = json::object();
    for (const auto& v : s.vars) vars[t.variables[static_cast<size_t>(v.var)].key] = values(v.values);
    out.push_back({{"test", t.test_id},
                   {"step", i},
                   {"node", s.node_id},
                   {"span", to_json(s.span)},
                   {"vars", vars},
                   {"stdin_pos", s.io.stdin_pos}});
  }
  json final_vars = json::object();
  for (const auto& v : t.final_vars) final_vars[t.variables[static_cast<size_t>(v.var)].key] = values(v.values);
  out.push_back({{"test", t.test_id},
                 {"end", true},
                 {"outcome", outcome_name(t.outcome)},
                 {"error", runtime_error_name(t.error)},
                 {"error_message", t.error_message},
                 {"step_count", t.step_count},
                 {"truncated", t.truncated},
                 {"stdout", t.stdout_text},
                 {"final_vars", final_vars}});
  return out;
}

MisunderstandingProfile profile_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("profile: expected an object");
  MisunderstandingProfile p;
  for (const auto& [name, sev] : j.items()) {
    auto c = concept_from_name(name);
    if (!c) throw std::invalid_argument("'" + name + "': unknown concept");
    if (!sev.is_object()) throw std::invalid_argument("'" + name + "': expected {r, e, m}");
    for (const auto& [k, v] : sev.items()) {
      auto comp = component_from_name(k);
      if (!comp) throw std::invalid_argument("'" + name + "." + k + "': unknown component");
      if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0)
        throw std::invalid_argument("'" + name + "." + k + "': severity must lie in [0, 1]");
      p.set(*c, *comp, v.get<double>());
    }
  }
  return p;
}

}  // namespace cdiag
