#include "cdiag/matcher.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "cdiag/assignment.hpp"

namespace cdiag {

std::optional<std::string> VariableMapping::reference_for(const std::string& student) const {
  for (const auto& p : pairs)
    if (p.student == student) return p.reference;
  return std::nullopt;
}

std::optional<std::string> VariableMapping::student_for(const std::string& reference) const {
  for (const auto& p : pairs)
    if (p.reference == reference) return p.student;
  return std::nullopt;
}

namespace {

constexpr size_t kHistoryCap = 64;

bool same_value(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return values_equal(a, b);
}

bool same_values(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_value(a[i], b[i])) return false;
  return true;
}

const VarSnapshot* find_snapshot(const std::vector<VarSnapshot>& vars, int var) {
  for (const auto& v : vars)
    if (v.var == var) return &v;
  return nullptr;
}

int var_index(const ExecutionTrace& t, const std::string& key) {
  for (size_t i = 0; i < t.variables.size(); ++i)
    if (t.variables[i].key == key) return static_cast<int>(i);
  return -1;
}

using History = std::vector<std::vector<double>>;

// Consecutive-distinct values of one variable over a trace, capped.
History history(const ExecutionTrace& t, int var) {
  History h;
  if (var < 0) return h;
  for (const auto& s : t.steps) {
    const VarSnapshot* v = find_snapshot(s.vars, var);
    if (!v) continue;
    if (!h.empty() && same_values(h.back(), v->values)) continue;
    h.push_back(v->values);
    if (h.size() >= kHistoryCap) break;
  }
  return h;
}

double lcs_ratio(const History& a, const History& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j)
      cur[j] = same_values(a[i - 1], b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return 2.0 * prev[b.size()] / static_cast<double>(a.size() + b.size());
}

double type_similarity(const TypeSpec& a, const TypeSpec& b) {
  if (a == b) return 1.0;
  if (!a.is_array() && !b.is_array() && a.is_integer() && b.is_integer()) return 0.5;
  if (a.is_array() && b.is_array() && a.is_char() && b.is_char()) return 0.5;
  return 0.0;
}

// Concept x {def, use} counts per variable.
using Usage = std::array<int, 2 * kConceptCount>;

void usage_rec(const Node& n, const Node* stmt, bool def, const std::vector<int>& decls,
               std::map<int, Usage>& out) {
  const Node* s = is_statement(n.kind) || n.kind == NodeKind::Function ? &n : stmt;
  if (n.kind == NodeKind::VarRef) {
    int d = n.id >= 0 && n.id < static_cast<int>(decls.size()) ? decls[n.id] : -1;
    if (d >= 0 && s) out[d][2 * static_cast<int>(concept_of(*s)) + (def ? 0 : 1)]++;
    return;
  }
  if (n.kind == NodeKind::VarDecl && !n.children.empty())
    out[n.id][2 * static_cast<int>(concept_of(n))]++;
  for (size_t i = 0; i < n.children.size(); ++i) {
    bool child_def = false;
    if ((n.kind == NodeKind::Assign || n.kind == NodeKind::IncDec || n.kind == NodeKind::Fopen) &&
        i == 0)
      child_def = true;
    if (n.kind == NodeKind::AddrOf) child_def = true;
    if (n.kind == NodeKind::Index && i == 0) child_def = def;
    usage_rec(n.children[i], s, child_def, decls, out);
  }
}

std::vector<Usage> usage_table(const Ast& ast, const std::vector<VariableInfo>& vars) {
  std::map<int, Usage> by_decl;
  usage_rec(ast.root, nullptr, false, reference_decls(ast), by_decl);
  std::vector<Usage> out(vars.size(), Usage{});
  for (size_t i = 0; i < vars.size(); ++i) {
    auto it = by_decl.find(vars[i].decl_id);
    if (it != by_decl.end()) out[i] = it->second;
  }
  return out;
}

double usage_similarity(const Usage& a, const Usage& b) {
  double lo = 0, hi = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    lo += std::min(a[i], b[i]);
    hi += std::max(a[i], b[i]);
  }
  return hi == 0 ? 1.0 : lo / hi;
}

std::string bare_name(const std::string& key) {
  auto dot = key.rfind('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}

}  // namespace

std::vector<std::vector<VariableSimilarity>> similarity_matrix(
    const Ast& student, const Ast& reference, const std::vector<ExecutionTrace>& traces_s,
    const std::vector<ExecutionTrace>& traces_r) {
  auto vs = collect_variables(student);
  auto vr = collect_variables(reference);
  auto us = usage_table(student, vs);
  auto ur = usage_table(reference, vr);
  size_t tests = std::min(traces_s.size(), traces_r.size());

  std::vector<std::vector<History>> hs(vs.size()), hr(vr.size());
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t t = 0; t < tests; ++t) hs[i].push_back(history(traces_s[t], var_index(traces_s[t], vs[i].key)));
  for (size_t j = 0; j < vr.size(); ++j)
    for (size_t t = 0; t < tests; ++t) hr[j].push_back(history(traces_r[t], var_index(traces_r[t], vr[j].key)));

  std::vector<std::vector<VariableSimilarity>> m(vs.size(),
                                                 std::vector<VariableSimilarity>(vr.size()));
  for (size_t i = 0; i < vs.size(); ++i) {
    for (size_t j = 0; j < vr.size(); ++j) {
      VariableSimilarity& s = m[i][j];
      s.type = type_similarity(vs[i].type, vr[j].type);
      s.usage = usage_similarity(us[i], ur[j]);
      if (tests == 0) {
        s.trace = 1.0;
      } else {
        double sum = 0;
        for (size_t t = 0; t < tests; ++t) sum += lcs_ratio(hs[i][t], hr[j][t]);
        s.trace = sum / static_cast<double>(tests);
      }
    }
  }
  return m;
}

VariableMapping map_variables(const Ast& student, const Ast& reference,
                              const std::vector<ExecutionTrace>& traces_s,
                              const std::vector<ExecutionTrace>& traces_r,
                              const SimilarityWeights& w) {
  auto vs = collect_variables(student);
  auto vr = collect_variables(reference);
  auto sim = similarity_matrix(student, reference, traces_s, traces_r);
  VariableMapping out;
  std::vector<int> row_to_col;
  if (!vs.empty() && !vr.empty()) {
    std::vector<std::vector<double>> cost(vs.size(), std::vector<double>(vr.size()));
    for (size_t i = 0; i < vs.size(); ++i)
      for (size_t j = 0; j < vr.size(); ++j)
        cost[i][j] = -sim[i][j].blended(w) +
                     1e-9 * std::abs(static_cast<double>(i) - static_cast<double>(j));
    row_to_col = solve_assignment(cost);
  } else {
    row_to_col.assign(vs.size(), -1);
  }
  std::vector<char> ref_used(vr.size(), 0);
  for (size_t i = 0; i < vs.size(); ++i) {
    int j = row_to_col[i];
    double score = j >= 0 ? sim[i][j].blended(w) : 0.0;
    if (j >= 0 && score >= w.threshold) {
      out.pairs.push_back({vs[i].key, vr[j].key, score});
      ref_used[j] = 1;
    } else {
      out.unmatched_student.push_back(vs[i].key);
    }
  }
  for (size_t j = 0; j < vr.size(); ++j)
    if (!ref_used[j]) out.unmatched_reference.push_back(vr[j].key);
  return out;
}

VariableMapping identity_mapping(const Ast& student, const Ast& reference) {
  auto vs = collect_variables(student);
  auto vr = collect_variables(reference);
  VariableMapping out;
  std::vector<char> ref_used(vr.size(), 0);
  for (const auto& s : vs) {
    bool found = false;
    for (size_t j = 0; j < vr.size(); ++j) {
      if (!ref_used[j] && vr[j].key == s.key) {
        out.pairs.push_back({s.key, vr[j].key, 1.0});
        ref_used[j] = 1;
        found = true;
        break;
      }
    }
    if (!found) out.unmatched_student.push_back(s.key);
  }
  for (size_t j = 0; j < vr.size(); ++j)
    if (!ref_used[j]) out.unmatched_reference.push_back(vr[j].key);
  return out;
}

Ast rename_through(const Ast& student, const VariableMapping& mapping) {
  auto vars = collect_variables(student);
  std::map<int, std::string> new_name;  // decl id -> name
  for (const auto& v : vars) {
    auto r = mapping.reference_for(v.key);
    new_name[v.decl_id] = r ? bare_name(*r) : "?" + v.name;
  }
  auto decls = reference_decls(student);
  Ast out = student;
  visit_mut(out.root, [&](Node& n) {
    if (n.kind == NodeKind::VarDecl) {
      auto it = new_name.find(n.id);
      if (it != new_name.end()) n.text = it->second;
    } else if (n.kind == NodeKind::VarRef && n.id >= 0 &&
               n.id < static_cast<int>(decls.size()) && decls[n.id] >= 0) {
      auto it = new_name.find(decls[n.id]);
      if (it != new_name.end()) n.text = it->second;
    }
  });
  return out;
}

// ---- responses ---------------------------------------------------------------

const char* outcome_code_name(OutcomeCode c) {
  switch (c) {
    case OutcomeCode::Match: return "match";
    case OutcomeCode::StdoutMismatch: return "stdout-mismatch";
    case OutcomeCode::ValueMismatch: return "value-mismatch";
    case OutcomeCode::Crash: return "crash";
    case OutcomeCode::StepLimit: return "step-limit";
    case OutcomeCode::MissingOutput: return "missing-output";
  }
  return "?";
}

const char* mismatch_kind_name(MismatchKind k) {
  switch (k) {
    case MismatchKind::StructuralDiff: return "structural-diff";
    case MismatchKind::ValueDivergence: return "value-divergence";
    case MismatchKind::OutcomeDivergence: return "outcome-divergence";
  }
  return "?";
}

bool ResponseVector::all_match() const {
  for (auto c : codes)
    if (c != OutcomeCode::Match) return false;
  return true;
}

ResponseVector all_match_response(size_t n) {
  ResponseVector r;
  r.codes.assign(n, OutcomeCode::Match);
  r.divergence.assign(n, 0.0);
  return r;
}

double response_distance(const ResponseVector& a, const ResponseVector& b) {
  if (a.codes.size() != b.codes.size() || a.divergence.size() != a.codes.size() ||
      b.divergence.size() != b.codes.size())
    throw std::invalid_argument("response vectors differ in length");
  if (a.codes.empty()) return 0.0;
  double sum = 0;
  for (size_t i = 0; i < a.codes.size(); ++i) {
    if (a.codes[i] != b.codes[i]) sum += 1.0;
    double t = std::abs(a.divergence[i] - b.divergence[i]);
    sum += t / (1.0 + t);
  }
  return sum / static_cast<double>(a.codes.size());
}

double trace_divergence(const ExecutionTrace& student, const ExecutionTrace& reference,
                        const VariableMapping& mapping) {
  if (reference.variables.empty()) return 0.0;
  double total = 0;
  for (size_t r = 0; r < reference.variables.size(); ++r) {
    auto s_key = mapping.student_for(reference.variables[r].key);
    if (!s_key) {
      total += 1.0;
      continue;
    }
    History hr = history(reference, static_cast<int>(r));
    History hs = history(student, var_index(student, *s_key));
    size_t n = std::max(hr.size(), hs.size());
    double d = 0, norm = 0;
    for (size_t k = 0; k < n; ++k) {
      double wk = 1.0 / static_cast<double>(k + 1);
      norm += wk;
      if (k >= hr.size() || k >= hs.size() || !same_values(hr[k], hs[k])) d += wk;
    }
    total += norm > 0 ? d / norm : 0.0;
  }
  return total / static_cast<double>(reference.variables.size());
}

ResponseVector compare_runs(const std::vector<ExecutionTrace>& student,
                            const std::vector<ExecutionTrace>& reference,
                            const VariableMapping& mapping) {
  if (student.size() != reference.size())
    throw std::invalid_argument("trace lists differ in length");
  ResponseVector out;
  for (size_t t = 0; t < student.size(); ++t) {
    const auto& s = student[t];
    const auto& r = reference[t];
    OutcomeCode code = OutcomeCode::Match;
    if (s.outcome == Outcome::RuntimeError && r.outcome != Outcome::RuntimeError) {
      code = OutcomeCode::Crash;
    } else if (s.outcome == Outcome::StepLimitExceeded &&
               r.outcome != Outcome::StepLimitExceeded) {
      code = OutcomeCode::StepLimit;
    } else if (s.stdout_text.empty() && !r.stdout_text.empty()) {
      code = OutcomeCode::MissingOutput;
    } else if (s.stdout_text != r.stdout_text) {
      code = OutcomeCode::StdoutMismatch;
    } else {
      for (const auto& p : mapping.pairs) {
        int si = var_index(s, p.student), ri = var_index(r, p.reference);
        const VarSnapshot* sv = si >= 0 ? find_snapshot(s.final_vars, si) : nullptr;
        const VarSnapshot* rv = ri >= 0 ? find_snapshot(r.final_vars, ri) : nullptr;
        if (!sv || !rv) continue;  // out of scope when execution stopped
        if (!same_values(sv->values, rv->values)) {
          code = OutcomeCode::ValueMismatch;
          break;
        }
      }
    }
    out.codes.push_back(code);
    out.divergence.push_back(trace_divergence(s, r, mapping));
  }
  return out;
}

// ---- mismatches --------------------------------------------------------------

namespace {

long first_step_in(const ExecutionTrace& t, const Ast& ast, int id) {
  if (id < 0) return LONG_MAX;
  const Node* n = find_node(ast.root, id);
  if (!n) return LONG_MAX;
  int end = id + n->size();
  for (size_t k = 0; k < t.steps.size(); ++k)
    if (t.steps[k].node_id >= id && t.steps[k].node_id < end) return static_cast<long>(k);
  return LONG_MAX;
}

}  // namespace

Diagnosis locate_mismatches(const Ast& student, const Ast& reference,
                            const std::vector<TestCase>& tests, const MatchOptions& opt) {
  Diagnosis d;
  if (opt.parallel) {
    d.student_traces = run_suite_parallel(student, tests, opt.exec);
    d.reference_traces = run_suite_parallel(reference, tests, opt.exec);
  } else {
    d.student_traces = run_suite_serial(student, tests, opt.exec);
    d.reference_traces = run_suite_serial(reference, tests, opt.exec);
  }
  d.mapping = map_variables(student, reference, d.student_traces, d.reference_traces, opt.weights);
  d.edits = diff_programs(student, reference, d.mapping);
  d.response = compare_runs(d.student_traces, d.reference_traces, d.mapping);

  int divergent = -1;
  for (size_t t = 0; t < d.response.size(); ++t) {
    if (d.response.codes[t] != OutcomeCode::Match) {
      divergent = static_cast<int>(t);
      break;
    }
  }
  size_t probe = divergent >= 0 ? static_cast<size_t>(divergent) : 0;

  for (const auto& e : d.edits) {
    Mismatch m;
    m.edit = e;
    if (e.student_id >= 0) m.student_span = e.student_span;
    if (e.reference_id >= 0) m.reference_span = e.reference_span;
    if (divergent >= 0) {
      m.first_divergent_test = tests[divergent].id;
      m.divergence_score = d.response.divergence[divergent];
      OutcomeCode code = d.response.codes[divergent];
      m.kind = code == OutcomeCode::ValueMismatch || code == OutcomeCode::StdoutMismatch
                   ? MismatchKind::ValueDivergence
                   : MismatchKind::OutcomeDivergence;
    }
    if (probe < tests.size()) {
      long s = e.student_id >= 0 ? first_step_in(d.student_traces[probe], student, e.student_id)
                                 : LONG_MAX;
      long r = e.reference_id >= 0
                   ? first_step_in(d.reference_traces[probe], reference, e.reference_id)
                   : LONG_MAX;
      m.first_step = std::min(s, r) == LONG_MAX ? -1 : std::min(s, r);
    }
    d.mismatches.push_back(std::move(m));
  }
  auto order_key = [](const Mismatch& m) {
    long step = m.first_step < 0 ? LONG_MAX : m.first_step;
    return std::make_tuple(step, m.edit.size, m.edit.student_id, m.edit.reference_id);
  };
  std::stable_sort(d.mismatches.begin(), d.mismatches.end(),
                   [&](const Mismatch& a, const Mismatch& b) { return order_key(a) < order_key(b); });
  for (size_t i = 0; i < d.mismatches.size(); ++i) {
    d.mismatches[i].id = static_cast<int>(i) + 1;
    d.mismatches[i].execution_order = static_cast<int>(i);
  }
  return d;
}

}  // namespace cdiag
