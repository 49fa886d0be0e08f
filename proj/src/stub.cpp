#include "cdiag/stub.hpp"

namespace cdiag {

namespace {

bool starts_at(const SourceSpan& a, const SourceSpan& b) {
  return a.start_line == b.start_line && a.start_col == b.start_col;
}
bool ends_at(const SourceSpan& a, const SourceSpan& b) {
  return a.end_line == b.end_line && a.end_col == b.end_col;
}

bool search(const Node& n, const SourceSpan& span, std::pair<int, int>& hit) {
  if (is_statement(n.kind) && n.span == span) {
    hit = {n.id, n.id};
    return true;
  }
  if (n.kind == NodeKind::Block) {
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (!starts_at(n.children[i].span, span)) continue;
      for (size_t j = i; j < n.children.size(); ++j) {
        if (ends_at(n.children[j].span, span)) {
          hit = {n.children[i].id, n.children[j].id};
          return true;
        }
      }
    }
  }
  for (const auto& c : n.children)
    if (search(c, span, hit)) return true;
  return false;
}

}  // namespace

std::pair<int, int> find_fragment(const Ast& ast, const SourceSpan& span) {
  std::pair<int, int> hit{-1, -1};
  if (!span.valid() || !search(ast.root, span, hit))
    throw FragmentNotExtractable("span " + span.str() + " does not cover whole statements");
  const Node* n = find_node(ast.root, hit.first);
  if (!n || n->kind == NodeKind::VarDecl) {
    // a lone global declaration has no enclosing function to run in
    bool global = true;
    for (const auto& top : ast.root.children)
      if (top.kind == NodeKind::Function && top.span.contains(span)) global = false;
    if (global) throw FragmentNotExtractable("fragment is outside every function");
  }
  return hit;
}

Harness harness_before(const ExecutionTrace& seed, int first_id, int end_id, int* seed_step) {
  int k = -1;
  for (size_t i = 0; i < seed.steps.size(); ++i) {
    int id = seed.steps[i].node_id;
    if (id >= first_id && id < end_id) {
      k = static_cast<int>(i);
      break;
    }
  }
  if (k < 0) throw FragmentNotExtractable("fragment is not reached by the seeding trace");
  if (seed_step) *seed_step = k;
  return harness_at(seed, k);
}

Harness harness_at(const ExecutionTrace& seed, int step) {
  Harness h;
  if (step <= 0) return h;  // nothing ran before: the program's initial state
  const TraceStep& prev = seed.steps.at(static_cast<size_t>(step - 1));
  for (const auto& v : prev.vars) h.values[seed.variables[v.var].key] = v.values;
  h.io = prev.io;
  return h;
}

std::vector<int> fragment_entries(const ExecutionTrace& seed, int first_id, int end_id) {
  std::vector<int> out;
  bool inside = false;
  for (size_t i = 0; i < seed.steps.size(); ++i) {
    int id = seed.steps[i].node_id;
    bool in = id >= first_id && id < end_id;
    if (in && !inside) out.push_back(static_cast<int>(i));
    inside = in;
  }
  return out;
}

Stub make_stub(const Ast& ast, const SourceSpan& fragment_span, const ExecutionTrace& seed,
               std::vector<TestCase> probes) {
  auto [first, last] = find_fragment(ast, fragment_span);
  const Node* l = find_node(ast.root, last);
  int seed_step = -1;
  Harness h = harness_before(seed, first, last + l->size(), &seed_step);
  Stub s = make_stub(ast, first, last, std::move(h), std::move(probes));
  s.fragment_span = fragment_span;
  s.seed_step = seed_step;
  return s;
}

Stub make_stub(const Ast& ast, int first_id, int last_id, Harness harness,
               std::vector<TestCase> probes) {
  const Node* f = find_node(ast.root, first_id);
  const Node* l = find_node(ast.root, last_id);
  if (!f || !l || !is_statement(f->kind) || !is_statement(l->kind))
    throw FragmentNotExtractable("fragment ids do not name statements");
  Stub s;
  s.program = ast;
  s.first_id = first_id;
  s.last_id = last_id;
  s.fragment_span = cover(f->span, l->span);
  s.harness = std::move(harness);
  s.probes = std::move(probes);
  return s;
}

ExecutionTrace execute_stub(const Stub& stub, const TestCase& probe, const ExecOptions& opt) {
  return execute_fragment(stub.program, stub.first_id, stub.last_id, stub.harness, probe, opt);
}

}  // namespace cdiag
