#include "cdiag/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "cdiag/stub.hpp"

namespace cdiag {

namespace {

constexpr const char* kCategoryNames[kCategoryCount] = {
    "incorrect-recall", "incorrect-extension", "incorrect-modification",
    "incorrect-sequence", "stuck-at-start", "background-gap"};

constexpr const char* kStepNames[kPlanStepCount] = {
    "identify-situations", "identify-variables", "initialize-variables",
    "find-places-to-modify", "modify-variables"};

// ---- operator classes ---------------------------------------------------------

std::string op_class(const std::string& op) {
  if (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=")
    return "relational";
  if (op == "&&" || op == "||") return "logical";
  if (op == "!") return "negation";
  if (op == "*" || op == "/" || op == "%") return "multiplicative";
  if (op == "+" || op == "++" || op == "+=") return "+";
  if (op == "-" || op == "--" || op == "-=") return "-";
  if (op == "*=" || op == "/=" || op == "%=") return "multiplicative";
  // each bitwise operator is its own class; compound forms share it
  if (op.size() >= 2 && op.back() == '=' && op != "==") return op.substr(0, op.size() - 1);
  return op;
}

void collect_classes(const Node& n, std::set<std::string>& out) {
  switch (n.kind) {
    case NodeKind::Binary:
      out.insert(op_class(n.text));
      break;
    case NodeKind::Unary:
      if (n.text != "-" || n.children.empty() ||
          (n.children[0].kind != NodeKind::IntLit && n.children[0].kind != NodeKind::FloatLit))
        out.insert(op_class(n.text));
      break;
    case NodeKind::Assign:
      if (n.text != "=") out.insert(op_class(n.text));
      break;
    case NodeKind::IncDec:
      out.insert(op_class(n.text));
      break;
    case NodeKind::Index:
      out.insert("index");
      break;
    case NodeKind::Call:
      out.insert("call");
      break;
    default:
      break;
  }
  for (const auto& c : n.children) collect_classes(c, out);
}

// Operator classes of a statement's own line: the header of compound
// statements, the whole node otherwise.
std::set<std::string> head_classes(const Node& s) {
  std::set<std::string> out;
  switch (s.kind) {
    case NodeKind::If:
    case NodeKind::While:
      collect_classes(s.children[0], out);
      break;
    case NodeKind::For:
      for (int i = 0; i < 3; ++i) collect_classes(s.children[i], out);
      break;
    case NodeKind::Function:
    case NodeKind::Block:
    case NodeKind::Program:
      break;
    default:
      collect_classes(s, out);
  }
  return out;
}

// ---- prerequisite-topic detection ----------------------------------------------

struct GapFinding {
  bool format = false;
  bool ascii = false;
  bool binary = false;
  bool other = false;
};

bool looks_binary_spelling(const std::string& s) {
  if (s.size() < 4) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) { return ch == '0' || ch == '1'; });
}

void compare_for_gap(const Node& s, const Node& r, GapFinding& g) {
  if (s.kind == NodeKind::CharLit && r.kind == NodeKind::IntLit) { g.ascii = true; return; }
  if (s.kind == NodeKind::IntLit && r.kind == NodeKind::CharLit) { g.ascii = true; return; }
  if (s.kind == NodeKind::IntLit && r.kind == NodeKind::IntLit && s.int_value != r.int_value) {
    if (looks_binary_spelling(s.text) && std::stoll(s.text, nullptr, 2) == r.int_value)
      g.binary = true;
    else
      g.other = true;
    return;
  }
  if (s.kind != r.kind || s.children.size() != r.children.size() || s.type != r.type ||
      s.aux != r.aux) {
    g.other = true;
    return;
  }
  bool formatted = s.kind == NodeKind::Scanf || s.kind == NodeKind::Printf ||
                   s.kind == NodeKind::Fscanf;
  if (s.text != r.text) {
    if (formatted)
      g.format = true;
    else
      g.other = true;
  }
  if (s.kind == NodeKind::CharLit && s.int_value != r.int_value) g.other = true;
  if (s.kind == NodeKind::FloatLit && s.float_value != r.float_value) g.other = true;
  for (size_t i = 0; i < s.children.size(); ++i) compare_for_gap(s.children[i], r.children[i], g);
}

// Compare only the statement's own line so nested bodies do not interfere.
void compare_heads_for_gap(const Node& s, const Node& r, GapFinding& g) {
  if (s.kind != r.kind) { g.other = true; return; }
  switch (s.kind) {
    case NodeKind::If:
    case NodeKind::While:
      compare_for_gap(s.children[0], r.children[0], g);
      break;
    case NodeKind::For:
      for (int i = 0; i < 3; ++i) compare_for_gap(s.children[i], r.children[i], g);
      break;
    case NodeKind::Function:
    case NodeKind::Block:
    case NodeKind::Program:
      g.other = true;
      break;
    default:
      compare_for_gap(s, r, g);
  }
}

std::optional<std::string> prerequisite_topic(const Node& s, const Node& r,
                                              const std::vector<std::string>& allowed) {
  GapFinding g;
  compare_heads_for_gap(s, r, g);
  if (g.other) return std::nullopt;
  auto ok = [&](const char* t) {
    return std::find(allowed.begin(), allowed.end(), t) != allowed.end();
  };
  if (g.ascii && ok("ascii-codes")) return "ascii-codes";
  if (g.format && ok("format-descriptors")) return "format-descriptors";
  if (g.binary && ok("binary-representation")) return "binary-representation";
  return std::nullopt;
}

int executable_statements(const Ast& ast) {
  const Node* main = find_function(ast, "main");
  if (!main) return 0;
  int n = 0;
  visit(*main, [&](const Node& x) {
    if (!is_statement(x.kind)) return;
    switch (x.kind) {
      case NodeKind::VarDecl:
      case NodeKind::Return:
      case NodeKind::Block:
      case NodeKind::Empty:
        return;
      default:
        ++n;
    }
  });
  return n;
}

const ExecutionTrace* trace_for(const std::vector<ExecutionTrace>& traces, const std::string& id) {
  for (const auto& t : traces)
    if (t.test_id == id) return &t;
  return nullptr;
}

Classification finish(Classification c, const std::array<double, 3>& model,
                      const std::array<double, 3>& evidence, const ClassifierConfig& cfg) {
  for (int k = 0; k < 3; ++k) c.scores[k] = model[k] * evidence[k];
  c.category = static_cast<MisconceptionCategory>(argmax_likelihood(c.scores));
  c.component = component_of(c.category);
  c.severity_delta = cfg.severity_increment;
  return c;
}

Classification gated(Classification c, MisconceptionCategory cat, const ClassifierConfig& cfg) {
  c.category = cat;
  c.component = component_of(cat);
  c.severity_delta = cfg.severity_increment;
  return c;
}

}  // namespace

const char* category_name(MisconceptionCategory c) {
  return kCategoryNames[static_cast<int>(c)];
}

std::optional<MisconceptionCategory> category_from_name(std::string_view s) {
  for (int i = 0; i < kCategoryCount; ++i)
    if (s == kCategoryNames[i]) return static_cast<MisconceptionCategory>(i);
  return std::nullopt;
}

Component component_of(MisconceptionCategory c) {
  switch (c) {
    case MisconceptionCategory::IncorrectExtension:
      return Component::Extension;
    case MisconceptionCategory::IncorrectModification:
    case MisconceptionCategory::IncorrectSequence:
      return Component::Modification;
    default:
      return Component::Recall;
  }
}

int argmax_likelihood(const std::array<double, 3>& scores) {
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (scores[k] > scores[best]) best = k;
  return best;
}

std::array<double, 3> model_likelihoods(const SlaRecord& sla, ConceptId c,
                                        const std::string& exercise, const SlaParams& p) {
  bool has_recall = sla.known.count(c) > 0;
  auto adj = sla.adjustment.find(exercise);
  bool has_adj = adj != sla.adjustment.end();
  bool has_causal = !sla.causal.empty();
  std::array<double, 3> uniform = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  if (!has_recall && !has_adj && !has_causal) return uniform;

  // Components without evidence sit at the prior's success probability so
  // they neither win nor lose by default.
  double neutral = recall_probability(p.prior, p);
  double pr = has_recall ? recall_probability(sla.known.at(c), p) : neutral;
  double pe = has_adj ? adj->second : neutral;
  double pm = neutral;
  if (has_causal) {
    double s = 0.0;
    for (const auto& [k, v] : sla.causal) s += v;
    pm = s / static_cast<double>(sla.causal.size());
  }
  std::array<double, 3> l = {1.0 - pr, 1.0 - pe, 1.0 - pm};
  double total = l[0] + l[1] + l[2];
  if (!(total > 0.0)) return uniform;
  for (auto& v : l) v /= total;
  return l;
}

Classification classify(const Mismatch& m, const SlaRecord& sla, const ClassifyContext& ctx,
                        const ClassifierConfig& cfg) {
  Classification c;
  c.mismatch_id = m.id;
  c.concept_id = m.edit.concept_id;
  const Edit& e = m.edit;

  if (ctx.student && executable_statements(*ctx.student) <= cfg.stuck_statement_limit) {
    c.evidence.push_back("main has no executable statements");
    return gated(std::move(c), MisconceptionCategory::StuckAtStart, cfg);
  }

  const Node* s = (ctx.student && e.student_id >= 0) ? find_node(ctx.student->root, e.student_id)
                                                      : nullptr;
  const Node* r = (ctx.reference && e.reference_id >= 0)
                      ? find_node(ctx.reference->root, e.reference_id)
                      : nullptr;

  if (e.kind == EditKind::Update && s && r) {
    std::vector<std::string> allowed;
    for (const auto& t : ctx.prerequisites)
      if (std::find(cfg.prerequisites.begin(), cfg.prerequisites.end(), t) != cfg.prerequisites.end())
        allowed.push_back(t);
    if (auto topic = prerequisite_topic(*s, *r, allowed)) {
      c.evidence.push_back("difference confined to " + *topic);
      return gated(std::move(c), MisconceptionCategory::BackgroundGap, cfg);
    }
  }

  if (e.kind == EditKind::Move && e.reorder) {
    c.evidence.push_back("statement reordered within its block");
    return gated(std::move(c), MisconceptionCategory::IncorrectSequence, cfg);
  }

  std::array<double, 3> ev{};
  switch (e.kind) {
    case EditKind::Delete:
      if (r && ctx.reference &&
          (r->kind == NodeKind::VarDecl || is_local_initialization(*ctx.reference, r->id))) {
        ev[0] += 0.7;
        c.evidence.push_back("initialization missing: " + e.reference_label);
      } else {
        ev[2] += 0.8;
        c.evidence.push_back("statement missing: " + e.reference_label);
      }
      break;
    case EditKind::Insert:
      ev[2] += 0.8;
      c.evidence.push_back("extra statement: " + e.student_label);
      break;
    case EditKind::Move:
      ev[2] += 0.8;
      c.evidence.push_back("statement moved to another block: " + e.student_label);
      break;
    case EditKind::Update:
      if (s && r && s->kind == NodeKind::VarDecl && r->kind == NodeKind::VarDecl) {
        ev[1] += 0.8;
        c.evidence.push_back("declaration changed: " + e.reference_label + " -> " + e.student_label);
      } else if (s && r && s->kind == r->kind && head_classes(*s) == head_classes(*r)) {
        ev[1] += 0.8;
        c.evidence.push_back("same operators, different operands: " + e.reference_label + " -> " +
                             e.student_label);
      } else {
        ev[2] += 0.8;
        c.evidence.push_back("operators changed: " + e.reference_label + " -> " + e.student_label);
      }
      break;
  }

  if (ctx.diagnosis && !m.first_divergent_test.empty()) {
    if (const ExecutionTrace* t = trace_for(ctx.diagnosis->student_traces, m.first_divergent_test)) {
      if (t->outcome == Outcome::RuntimeError && t->error == RuntimeErrorKind::UninitializedRead) {
        ev[0] += 0.2;
        c.evidence.push_back("uninitialized read on test " + t->test_id);
      } else if (t->outcome == Outcome::RuntimeError &&
                 t->error == RuntimeErrorKind::FormatMismatch) {
        ev[1] += 0.2;
        c.evidence.push_back("format mismatch on test " + t->test_id);
      } else if (t->outcome == Outcome::StepLimitExceeded) {
        ev[2] += 0.2;
        c.evidence.push_back("step limit on test " + t->test_id);
      }
    }
  }
  if (ev[0] == 0.0 && ev[1] == 0.0 && ev[2] == 0.0) {
    ev[2] = 0.1;
    c.evidence.push_back("unexplained divergence");
  }

  auto model = model_likelihoods(sla, c.concept_id, ctx.exercise, cfg.sla);
  return finish(std::move(c), model, ev, cfg);
}

Classification classify_parse_failure(const std::vector<ParseError>& errors,
                                      const std::string& source, const SlaRecord& sla,
                                      const ClassifierConfig& cfg) {
  Classification c;
  c.mismatch_id = 1;
  bool blank = std::all_of(source.begin(), source.end(),
                           [](unsigned char ch) { return std::isspace(ch) != 0; });
  if (blank || source.find("main") == std::string::npos) {
    c.evidence.push_back("no main function");
    return gated(std::move(c), MisconceptionCategory::StuckAtStart, cfg);
  }
  if (!errors.empty()) {
    c.concept_id = errors.front().hint;
    for (const auto& e : errors)
      c.evidence.push_back("parse error at " + e.span.str() + ": " + e.message);
  }
  auto model = model_likelihoods(sla, c.concept_id, "", cfg.sla);
  return finish(std::move(c), model, {1.0, 0.0, 0.0}, cfg);
}

void apply_classification(MisunderstandingProfile& profile, const Classification& c) {
  profile.add(c.concept_id, c.component, c.severity_delta);
}

// ---- adjustment error score ----------------------------------------------------

namespace {
constexpr size_t kMaxEntries = 256;  // fragment entries tried per probe test
}  // namespace

AdjustmentErrorScore score_adjustment(ConceptId concept_id, const std::vector<Mismatch>& mismatches,
                                      const Ast& student, const Ast& reference,
                                      const Diagnosis& diagnosis,
                                      const std::vector<TestCase>& tests, int probes) {
  AdjustmentErrorScore out;
  out.concept_id = concept_id;
  double whole = response_distance(diagnosis.response, all_match_response(diagnosis.response.size()));

  for (const auto& m : mismatches) {
    if (m.edit.concept_id != concept_id) continue;
    AdjustmentPair pair;
    pair.mismatch_id = m.id;
    pair.performed = m.edit.student_label;
    pair.expected = m.edit.reference_label;
    pair.gap = whole * whole;

    const Node* s = m.edit.student_id >= 0 ? find_node(student.root, m.edit.student_id) : nullptr;
    const Node* r = m.edit.reference_id >= 0 ? find_node(reference.root, m.edit.reference_id) : nullptr;
    if (s && r && is_statement(s->kind) && is_statement(r->kind) &&
        (m.edit.kind == EditKind::Update || m.edit.kind == EditKind::Move)) {
      std::vector<ExecutionTrace> st, rt;
      try {
        for (size_t i = 0; i < tests.size() && static_cast<int>(rt.size()) < probes; ++i) {
          const ExecutionTrace* seed = trace_for(diagnosis.reference_traces, tests[i].id);
          if (!seed) continue;
          // Every entry into the fragment is a candidate state; the first one
          // on which the two fragments disagree stands for the test.
          std::vector<int> entries = fragment_entries(*seed, r->id, r->id + r->size());
          if (entries.size() > kMaxEntries) entries.resize(kMaxEntries);
          std::optional<std::pair<ExecutionTrace, ExecutionTrace>> chosen;
          for (int step : entries) {
            Harness rh = harness_at(*seed, step);
            Harness sh;
            sh.io = rh.io;
            for (const auto& [key, vals] : rh.values)
              if (auto sk = diagnosis.mapping.student_for(key)) sh.values[*sk] = vals;
            ExecutionTrace rtr = execute_fragment(reference, r->id, r->id, rh, tests[i]);
            ExecutionTrace stt = execute_fragment(student, s->id, s->id, sh, tests[i]);
            bool differs = !compare_runs({stt}, {rtr}, diagnosis.mapping).all_match();
            if (!chosen || differs) chosen.emplace(std::move(stt), std::move(rtr));
            if (differs) break;
          }
          if (!chosen) continue;  // the fragment does not run on this test
          st.push_back(std::move(chosen->first));
          rt.push_back(std::move(chosen->second));
        }
      } catch (const std::exception&) {
        st.clear();
        rt.clear();
      }
      if (!rt.empty()) {
        ResponseVector resp = compare_runs(st, rt, diagnosis.mapping);
        double d = response_distance(resp, all_match_response(resp.size()));
        pair.gap = d * d;
      }
    }
    out.score += pair.gap;
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

// ---- modification plan ---------------------------------------------------------

namespace {

struct DefInfo {
  bool defined = false;  // any write
  bool updated = false;  // a write that depends on the previous value or sits in a loop
};

bool refers_to(const Node& n, int decl, const std::vector<int>& decls) {
  bool hit = false;
  visit(n, [&](const Node& x) {
    if (x.kind == NodeKind::VarRef && decls[x.id] == decl) hit = true;
  });
  return hit;
}

int target_decl(const Node& lvalue, const std::vector<int>& decls) {
  const Node* v = &lvalue;
  if (v->kind == NodeKind::AddrOf) v = &v->children[0];
  if (v->kind == NodeKind::Index) v = &v->children[0];
  return v->kind == NodeKind::VarRef ? decls[v->id] : -1;
}

void scan_defs(const Node& n, const std::vector<int>& decls, int loop_depth,
               std::map<int, DefInfo>& out) {
  auto mark = [&](int decl, bool update) {
    if (decl < 0) return;
    out[decl].defined = true;
    if (update) out[decl].updated = true;
  };
  switch (n.kind) {
    case NodeKind::VarDecl:
      if (!n.children.empty()) mark(n.id, false);
      break;
    case NodeKind::Assign: {
      int d = target_decl(n.children[0], decls);
      bool self = n.text != "=" || refers_to(n.children[1], d, decls);
      mark(d, self || loop_depth > 0);
      break;
    }
    case NodeKind::IncDec:
      mark(target_decl(n.children[0], decls), true);
      break;
    case NodeKind::Scanf:
      for (const auto& t : n.children) mark(target_decl(t, decls), loop_depth > 0);
      break;
    case NodeKind::Fscanf:
      for (size_t i = 1; i < n.children.size(); ++i)
        mark(target_decl(n.children[i], decls), loop_depth > 0);
      break;
    case NodeKind::Fopen:
      mark(target_decl(n.children[0], decls), false);
      break;
    default:
      break;
  }
  int depth = loop_depth + ((n.kind == NodeKind::While || n.kind == NodeKind::For) ? 1 : 0);
  for (const auto& c : n.children) scan_defs(c, decls, depth, out);
}

std::map<std::string, DefInfo> defs_by_key(const Ast& ast) {
  auto decls = reference_decls(ast);
  std::map<int, DefInfo> by_decl;
  scan_defs(ast.root, decls, 0, by_decl);
  std::map<std::string, DefInfo> out;
  for (const auto& v : collect_variables(ast)) {
    auto it = by_decl.find(v.decl_id);
    out[v.key] = it == by_decl.end() ? DefInfo{} : it->second;
  }
  return out;
}

bool is_update_statement(const Node& n) {
  return n.kind == NodeKind::Assign || n.kind == NodeKind::IncDec;
}

bool is_situation_head(const Node& n) {
  return n.kind == NodeKind::If || n.kind == NodeKind::While || n.kind == NodeKind::For;
}

}  // namespace

const char* plan_step_name(PlanStep s) { return kStepNames[static_cast<int>(s)]; }

bool ModificationPlan::precedence_holds() const {
  bool seen_incomplete = false;
  for (const auto& s : steps) {
    if (seen_incomplete && s.complete) return false;
    if (!s.complete) seen_incomplete = true;
  }
  return true;
}

ModificationPlan assess_modification_plan(const Diagnosis& d, const Ast& student,
                                          const Ast& reference,
                                          const std::vector<std::string>& background) {
  ModificationPlan plan;
  plan.background = background;
  for (int i = 0; i < kPlanStepCount; ++i) plan.steps[i].step = static_cast<PlanStep>(i);
  auto flag = [&](PlanStep s, std::string why) {
    auto& st = plan.steps[static_cast<int>(s)];
    st.complete = false;
    st.delta.push_back(std::move(why));
  };

  for (const auto& v : d.mapping.unmatched_reference)
    flag(PlanStep::IdentifyVariables, "missing variable " + v);

  auto sdefs = defs_by_key(student);
  auto rdefs = defs_by_key(reference);
  for (const auto& p : d.mapping.pairs) {
    const DefInfo& rd = rdefs[p.reference];
    const DefInfo& sd = sdefs[p.student];
    if (rd.defined && !sd.defined)
      flag(PlanStep::InitializeVariables, p.student + " is never initialized");
    if (rd.updated && !sd.updated) {
      flag(PlanStep::FindPlacesToModify, p.student + " is never updated");
      flag(PlanStep::ModifyVariables, p.student + " is never updated");
    }
  }
  for (const auto& t : d.student_traces)
    if (t.outcome == Outcome::RuntimeError && t.error == RuntimeErrorKind::UninitializedRead) {
      flag(PlanStep::InitializeVariables, "uninitialized read on test " + t.test_id);
      break;
    }

  bool some_pass = false, some_fail = false;
  for (auto code : d.response.codes) (code == OutcomeCode::Match ? some_pass : some_fail) = true;

  bool situation_evidence = false;
  for (const auto& e : d.edits) {
    const Node* r = e.reference_id >= 0 ? find_node(reference.root, e.reference_id) : nullptr;
    const Node* s = e.student_id >= 0 ? find_node(student.root, e.student_id) : nullptr;
    const Node* any = r ? r : s;
    if (e.kind == EditKind::Delete && r && is_local_initialization(reference, r->id)) {
      flag(PlanStep::InitializeVariables, "initialization removed: " + e.reference_label);
      continue;
    }
    if (e.kind == EditKind::Move && !e.reorder && any && is_update_statement(*any)) {
      flag(PlanStep::FindPlacesToModify, "update placed in another block: " + e.student_label);
      continue;
    }
    if (e.kind == EditKind::Update && r && s && is_situation_head(*r) && is_situation_head(*s)) {
      if (some_pass && some_fail) {
        situation_evidence = true;
        flag(PlanStep::IdentifySituations, "condition differs: " + e.reference_label + " -> " +
                                               e.student_label);
      }
      continue;
    }
    if (any && is_update_statement(*any) && e.kind != EditKind::Move)
      flag(PlanStep::ModifyVariables, std::string(edit_kind_name(e.kind)) + ": " +
                                          (r ? e.reference_label : e.student_label));
  }

  // Step 1 without direct evidence follows step 2: variables are chosen for
  // the situations the student recognized.
  if (!situation_evidence && !d.response.all_match() && !plan.steps[1].complete)
    flag(PlanStep::IdentifySituations, "not established while variables are missing");

  bool incomplete = false;
  for (auto& st : plan.steps) {
    if (incomplete && st.complete) {
      st.complete = false;
      st.delta.push_back("preceding step incomplete");
    }
    if (!st.complete) incomplete = true;
  }
  return plan;
}

}  // namespace cdiag
