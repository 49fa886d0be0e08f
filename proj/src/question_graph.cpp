#include <algorithm>
#include <deque>

#include "cdiag/corpus.hpp"
#include "cdiag/dialog.hpp"
#include "cdiag/interpreter.hpp"
#include "cdiag/parser.hpp"

namespace cdiag {

const char* link_kind_name(LinkKind k) {
  switch (k) {
    case LinkKind::Synonym: return "synonym";
    case LinkKind::Homonym: return "homonym";
    case LinkKind::Abstraction: return "abstraction";
  }
  return "?";
}

std::string Target::str() const {
  return std::string(concept_name(concept_id)) + "/" + std::string(component_name(type));
}

Target target_from_state(int state) {
  return {static_cast<ConceptId>(state % kConceptCount),
          static_cast<Component>(state / kConceptCount)};
}

Component component_for(MutationCategory c) {
  switch (c) {
    case MutationCategory::Recall: return Component::Recall;
    case MutationCategory::Extension: return Component::Extension;
    default: return Component::Modification;
  }
}

const CatalogEntry* QuestionGraph::fault_for(const Target& t) const {
  int i = fault_index(t);
  return i < 0 ? nullptr : &catalog[static_cast<size_t>(i)];
}

int QuestionGraph::fault_index(const Target& t) const {
  for (size_t i = 0; i < catalog.size(); ++i)
    if (catalog[i].target == t) return static_cast<int>(i);
  return -1;
}

int QuestionGraph::distance(int from, const Target& t) const {
  std::vector<int> dist(questions.size(), -1);
  std::deque<int> queue{from};
  dist[static_cast<size_t>(from)] = 0;
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    if (questions[static_cast<size_t>(q)].target == t) return dist[static_cast<size_t>(q)];
    for (const auto& e : questions[static_cast<size_t>(q)].edges) {
      if (dist[static_cast<size_t>(e.to)] >= 0) continue;
      dist[static_cast<size_t>(e.to)] = dist[static_cast<size_t>(q)] + 1;
      queue.push_back(e.to);
    }
  }
  return static_cast<int>(questions.size());
}

namespace {

void substitute(std::string& text, const std::string& key, const std::string& value) {
  for (size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + value.size()))
    text.replace(at, key.size(), value);
}

std::string fill(std::string tmpl, const Target& t) {
  substitute(tmpl, "{concept}", std::string(concept_name(t.concept_id)));
  substitute(tmpl, "{target}", t.str());
  return tmpl;
}

/// Tests on which the fault changes stdout or outcome; all tests if none do.
std::vector<TestCase> discriminating_tests(const Exercise& ex, const CatalogEntry& c,
                                           const std::vector<ExecutionTrace>& ref) {
  std::vector<TestCase> out;
  if (!c.breaks_parse) {
    Mutant m = apply_mutation(ex.reference, c.site);
    ParseResult pr = parse(m.source);
    if (pr.ok()) {
      ExecOptions opt;
      opt.record_steps = false;
      for (size_t i = 0; i < ex.tests.size(); ++i) {
        ExecutionTrace t = execute(pr.ast, ex.tests[i], opt);
        if (t.stdout_text != ref[i].stdout_text || t.outcome != ref[i].outcome)
          out.push_back(ex.tests[i]);
      }
    }
  }
  return out.empty() ? ex.tests : out;
}

void link(QuestionGraph& g, int a, int b, LinkKind k) {
  auto& ea = g.questions[static_cast<size_t>(a)].edges;
  auto& eb = g.questions[static_cast<size_t>(b)].edges;
  if (std::none_of(ea.begin(), ea.end(), [&](const QuestionEdge& e) { return e.to == b; }))
    ea.push_back({b, k});
  if (std::none_of(eb.begin(), eb.end(), [&](const QuestionEdge& e) { return e.to == a; }))
    eb.push_back({a, k});
}

}  // namespace

QuestionGraph build_question_graph(const Exercise& ex) {
  QuestionGraph g;
  std::map<Target, CatalogEntry> chosen;
  for (const auto& op : mutation_operators()) {
    Component type = component_for(op.category);
    for (const auto& site : mutation_sites(ex.reference, op.id)) {
      Target t{site.concept_id, type};
      if (chosen.count(t)) continue;
      Mutant m = apply_mutation(ex.reference, site);
      if (!killed_by_tests(m, ex)) continue;
      chosen[t] = {t, site, op.breaks_parse};
    }
  }
  for (auto& [t, c] : chosen) g.catalog.push_back(c);

  ExecOptions opt;
  opt.record_steps = false;
  std::vector<ExecutionTrace> ref = run_suite_serial(ex.reference, ex.tests, opt);
  const int k = std::max(1, ex.graph.probes_per_question);
  for (const auto& c : g.catalog) {
    std::vector<TestCase> pool = discriminating_tests(ex, c, ref);
    LinkKind primary = c.target.type == Component::Recall      ? LinkKind::Synonym
                       : c.target.type == Component::Extension ? LinkKind::Homonym
                                                               : LinkKind::Abstraction;
    for (int variant = 0; variant < 2; ++variant) {
      Question q;
      q.id = static_cast<int>(g.questions.size());
      q.target = c.target;
      q.link = variant == 0 ? primary : LinkKind::Synonym;
      const std::string& tmpl = q.link == LinkKind::Synonym   ? ex.graph.synonym
                                : q.link == LinkKind::Homonym ? ex.graph.homonym
                                                              : ex.graph.abstraction;
      q.prompt = fill(tmpl, c.target);
      for (int i = 0; i < k; ++i)
        q.probes.push_back(pool[static_cast<size_t>(variant * k + i) % pool.size()]);
      g.questions.push_back(std::move(q));
    }
  }

  // Synonyms share a target; homonyms join r and e of a concept; abstraction
  // edges lead from r or e up to m.
  for (size_t a = 0; a < g.questions.size(); ++a) {
    for (size_t b = a + 1; b < g.questions.size(); ++b) {
      const Target& ta = g.questions[a].target;
      const Target& tb = g.questions[b].target;
      if (ta.concept_id != tb.concept_id) continue;
      int ia = static_cast<int>(a), ib = static_cast<int>(b);
      if (ta.type == tb.type) {
        link(g, ia, ib, LinkKind::Synonym);
      } else if (ta.type != Component::Modification && tb.type != Component::Modification) {
        link(g, ia, ib, LinkKind::Homonym);
      } else {
        link(g, ia, ib, LinkKind::Abstraction);
      }
    }
  }
  return g;
}

}  // namespace cdiag
