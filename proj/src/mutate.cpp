#include "cdiag/mutate.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <set>

#include "cdiag/parser.hpp"

namespace cdiag {

const char* mutation_category_name(MutationCategory c) {
  switch (c) {
    case MutationCategory::Recall: return "recall";
    case MutationCategory::Extension: return "extension";
    case MutationCategory::Modification: return "modification";
    case MutationCategory::Sequence: return "sequence";
  }
  return "?";
}

std::optional<MutationCategory> mutation_category_from_name(std::string_view s) {
  for (int i = 0; i < kMutationCategoryCount; ++i)
    if (s == mutation_category_name(static_cast<MutationCategory>(i)))
      return static_cast<MutationCategory>(i);
  return std::nullopt;
}

const std::vector<OperatorInfo>& mutation_operators() {
  using C = MutationCategory;
  static const std::vector<OperatorInfo> ops = {
      {"drop-type", C::Recall, true},
      {"drop-semicolon", C::Recall, true},
      {"drop-ampersand", C::Recall, true},
      {"misspell-keyword", C::Recall, true},
      {"delete-init", C::Recall, false},
      {"narrow-separators", C::Extension, false},
      {"char-for-hex", C::Extension, false},
      {"off-by-one-constant", C::Extension, false},
      {"rescale-constant", C::Extension, false},
      {"relax-bound", C::Extension, false},
      {"wrong-char", C::Extension, false},
      {"no-overlap-reset", C::Modification, false},
      {"mask-fixation", C::Modification, false},
      {"operator-swap", C::Modification, false},
      {"drop-complement", C::Modification, false},
      {"delete-statement", C::Modification, false},
      {"hoist-update", C::Modification, false},
      {"duplicate-statement", C::Modification, false},
      {"negate-condition", C::Modification, false},
      {"swap-adjacent", C::Sequence, false},
      {"move-up", C::Sequence, false},
      {"move-down", C::Sequence, false},
  };
  return ops;
}

const OperatorInfo* find_operator(const std::string& id) {
  for (const auto& o : mutation_operators())
    if (o.id == id) return &o;
  return nullptr;
}

namespace {

// ---- shared analysis -----------------------------------------------------------

struct Ctx {
  const Node* node;
  const Node* parent;
  size_t index;          // position among parent's children
  const Node* stmt;      // innermost enclosing statement (or the node itself)
  const Node* function;  // enclosing function, null for globals
};

void walk(const Node& n, const Node* parent, size_t index, const Node* stmt, const Node* fn,
          std::vector<Ctx>& out) {
  const Node* s = is_statement(n.kind) ? &n : stmt;
  const Node* f = n.kind == NodeKind::Function ? &n : fn;
  out.push_back({&n, parent, index, s, f});
  for (size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], &n, i, s, f, out);
}

std::vector<Ctx> contexts(const Ast& ast) {
  std::vector<Ctx> out;
  walk(ast.root, nullptr, 0, nullptr, nullptr, out);
  return out;
}

bool is_simple(NodeKind k) {
  switch (k) {
    case NodeKind::VarDecl:
    case NodeKind::Assign:
    case NodeKind::IncDec:
    case NodeKind::Scanf:
    case NodeKind::Printf:
    case NodeKind::Fopen:
    case NodeKind::Fclose:
    case NodeKind::Return:
    case NodeKind::Break:
    case NodeKind::ExprStmt: return true;
    default: return false;
  }
}

bool in_block(const Ctx& c) { return c.parent && c.parent->kind == NodeKind::Block; }

bool contains_kind(const Node& n, NodeKind k) {
  bool found = false;
  visit(n, [&](const Node& x) {
    if (x.kind == k) found = true;
  });
  return found;
}

bool is_literal(const Node& e) {
  if (e.kind == NodeKind::IntLit || e.kind == NodeKind::CharLit || e.kind == NodeKind::FloatLit)
    return true;
  return e.kind == NodeKind::Unary && e.text == "-" && is_literal(e.children[0]);
}

bool whitespace_char(const Node& e) {
  return e.kind == NodeKind::CharLit && e.text.size() == 1 &&
         (e.text[0] == ' ' || e.text[0] == '\t' || e.text[0] == '\n' || e.text[0] == '\r');
}

// Reads and writes of a statement subtree; I/O and calls conflict with each other.
struct Effects {
  std::set<int> defs, uses;
  bool io = false;
};

Effects effects(const Node& s, const std::vector<int>& decls) {
  Effects e;
  std::function<void(const Node&, bool)> rec = [&](const Node& n, bool def) {
    if (n.kind == NodeKind::VarRef) {
      int d = n.id >= 0 && n.id < static_cast<int>(decls.size()) ? decls[n.id] : -1;
      if (d >= 0) (def ? e.defs : e.uses).insert(d);
      if (def && d >= 0) e.uses.insert(d);  // compound updates read too
      return;
    }
    if (n.kind == NodeKind::Scanf || n.kind == NodeKind::Fscanf || n.kind == NodeKind::Printf ||
        n.kind == NodeKind::Fopen || n.kind == NodeKind::Fclose || n.kind == NodeKind::Call)
      e.io = true;
    for (size_t i = 0; i < n.children.size(); ++i) {
      bool d = false;
      if ((n.kind == NodeKind::Assign || n.kind == NodeKind::IncDec || n.kind == NodeKind::Fopen) &&
          i == 0)
        d = true;
      if (n.kind == NodeKind::AddrOf) d = true;
      if (n.kind == NodeKind::Index && i == 0) d = def;
      rec(n.children[i], d);
    }
  };
  rec(s, false);
  return e;
}

bool dependent(const Effects& a, const Effects& b) {
  if (a.io && b.io) return true;
  auto meets = [](const std::set<int>& x, const std::set<int>& y) {
    for (int v : x)
      if (y.count(v)) return true;
    return false;
  };
  return meets(a.defs, b.uses) || meets(b.defs, a.uses) || meets(a.defs, b.defs);
}

bool movable(const Node& s) {
  return s.kind != NodeKind::VarDecl && s.kind != NodeKind::Return && s.kind != NodeKind::Empty &&
         s.kind != NodeKind::Break;
}

std::vector<const Node*> disjuncts(const Node& e) {
  if (e.kind == NodeKind::Binary && e.text == "||") {
    auto l = disjuncts(e.children[0]);
    auto r = disjuncts(e.children[1]);
    l.insert(l.end(), r.begin(), r.end());
    return l;
  }
  return {&e};
}

bool separator_test(const Node& cond) {
  auto ds = disjuncts(cond);
  if (ds.size() < 2) return false;
  for (const Node* d : ds) {
    if (d->kind != NodeKind::Binary || d->text != "==") return false;
    if (!whitespace_char(d->children[0]) && !whitespace_char(d->children[1])) return false;
  }
  return true;
}

// Literal not belonging to I/O formatting or a read-count comparison.
bool tweakable_int(const Ctx& c) {
  if (c.node->kind != NodeKind::IntLit || !c.stmt) return false;
  if (c.node->text == "NULL" || c.node->text == "EOF") return false;
  const Node& st = *c.stmt;
  if (st.kind == NodeKind::Printf || st.kind == NodeKind::Scanf || st.kind == NodeKind::VarDecl ||
      st.kind == NodeKind::Return)
    return false;
  if (c.parent && c.parent->kind == NodeKind::Binary) {
    for (const auto& ch : c.parent->children)
      if (ch.kind == NodeKind::Fscanf) return false;
  }
  if (c.parent && c.parent->kind == NodeKind::Index) return false;
  return true;
}

// Negative results take the parser's shape: unary minus over a literal.
void set_int_literal(Node& n, std::int64_t v) {
  n.int_value = v < 0 ? -v : v;
  n.text = std::to_string(n.int_value);
  if (v >= 0) return;
  Node neg;
  neg.kind = NodeKind::Unary;
  neg.text = "-";
  neg.span = n.span;
  neg.children.push_back(std::move(n));
  n = std::move(neg);
}

ConceptId stmt_concept(const Ctx& c) { return c.stmt ? concept_of(*c.stmt) : concept_of(*c.node); }

std::string head_of(const Node& s) { return render_statement_head(s); }

// ---- site enumeration --------------------------------------------------------------

std::vector<MutationSite> sites_for(const Ast& ast, const std::string& op) {
  std::vector<MutationSite> out;
  auto all = contexts(ast);
  auto decls = reference_decls(ast);
  auto add = [&](const Node& n, int variant, ConceptId c, std::string d) {
    out.push_back({op, n.id, variant, c, std::move(d)});
  };

  for (const Ctx& c : all) {
    const Node& n = *c.node;
    if (op == "drop-type") {
      if (n.kind == NodeKind::VarDecl) add(n, 0, ConceptId::VariableDeclaration, "drop type of " + n.text);
    } else if (op == "drop-semicolon") {
      if (is_simple(n.kind) && c.parent &&
          (c.parent->kind == NodeKind::Block || c.parent->kind == NodeKind::Program))
        add(n, 0, concept_of(n), "drop ';' after " + head_of(n));
    } else if (op == "drop-ampersand") {
      if (n.kind == NodeKind::AddrOf) add(n, 0, ConceptId::InputRead, "drop '&' in " + head_of(*c.stmt));
    } else if (op == "misspell-keyword") {
      if (n.kind == NodeKind::If || n.kind == NodeKind::While || n.kind == NodeKind::For)
        add(n, 0, concept_of(n), "misspell keyword of " + head_of(n));
    } else if (op == "delete-init") {
      if ((in_block(c) && is_local_initialization(ast, n.id)))
        add(n, 0, ConceptId::VariableDeclaration, "delete initialization " + head_of(n));
    } else if (op == "narrow-separators") {
      if ((n.kind == NodeKind::If || n.kind == NodeKind::While) && separator_test(n.children[0])) {
        auto ds = disjuncts(n.children[0]);
        for (size_t k = 0; k < ds.size(); ++k)
          add(n, static_cast<int>(k), concept_of(n),
              "drop separator test " + render_expression(*ds[k]));
      }
    } else if (op == "char-for-hex") {
      if (n.kind == NodeKind::VarDecl && !n.type.is_array() &&
          (n.type.base == BaseType::Int || n.type.base == BaseType::UInt)) {
        bool read = false;
        for (const Ctx& r : all)
          if (r.node->kind == NodeKind::AddrOf && r.node->children[0].kind == NodeKind::VarRef &&
              decls[r.node->children[0].id] == n.id)
            read = true;
        if (read) {
          add(n, 0, ConceptId::VariableDeclaration, "declare " + n.text + " as char");
          add(n, 1, ConceptId::VariableDeclaration, "declare " + n.text + " as unsigned char");
        }
      }
    } else if (op == "off-by-one-constant") {
      if (tweakable_int(c)) {
        add(n, 0, stmt_concept(c), "constant " + render_expression(n) + " + 1 in " + head_of(*c.stmt));
        add(n, 1, stmt_concept(c), "constant " + render_expression(n) + " - 1 in " + head_of(*c.stmt));
      }
    } else if (op == "rescale-constant") {
      if (tweakable_int(c) && n.int_value >= 2) {
        add(n, 0, stmt_concept(c), "constant " + render_expression(n) + " doubled in " + head_of(*c.stmt));
        add(n, 1, stmt_concept(c), "constant " + render_expression(n) + " halved in " + head_of(*c.stmt));
      }
    } else if (op == "relax-bound") {
      if (n.kind == NodeKind::Binary &&
          (n.text == "<" || n.text == "<=" || n.text == ">" || n.text == ">=") &&
          !contains_kind(n, NodeKind::Fscanf))
        add(n, 0, stmt_concept(c), "flip bound inclusiveness of " + render_expression(n));
    } else if (op == "wrong-char") {
      if (n.kind == NodeKind::CharLit && !whitespace_char(n) && c.parent &&
          c.parent->kind == NodeKind::Binary && (c.parent->text == "==" || c.parent->text == "!="))
        for (int v = 0; v < 3; ++v)
          add(n, v, stmt_concept(c), "compare with the wrong character instead of " + render_expression(n));
    } else if (op == "no-overlap-reset") {
      if (n.kind == NodeKind::If && n.children[1].kind == NodeKind::Block) {
        const auto& body = n.children[1].children;
        for (size_t k = 0; k + 1 < body.size(); ++k) {
          if (body[k].kind == NodeKind::If && body[k].children.size() == 2 &&
              body[k + 1].kind == NodeKind::Assign) {
            add(n, static_cast<int>(k), concept_of(n),
                "only " + head_of(body[k + 1]) + " when " + head_of(body[k]) + " fails");
            break;
          }
        }
      }
    } else if (op == "mask-fixation") {
      if (n.kind == NodeKind::Binary && (n.text == "<<" || n.text == ">>")) {
        add(n, 0, ConceptId::BitwiseMask, "replace " + render_expression(n) + " shift with '&'");
        add(n, 1, ConceptId::BitwiseMask, "replace " + render_expression(n) + " shift with '|'");
      }
    } else if (op == "operator-swap") {
      if (n.kind == NodeKind::Binary) {
        if (n.text == "&" || n.text == "|" || n.text == "^") {
          add(n, 0, stmt_concept(c), "swap operator in " + render_expression(n));
          add(n, 1, stmt_concept(c), "swap operator in " + render_expression(n));
        } else if (n.text == "+" || n.text == "-" || n.text == "<<" || n.text == ">>") {
          add(n, 0, stmt_concept(c), "swap operator in " + render_expression(n));
        }
      }
    } else if (op == "negate-condition") {
      if (n.kind == NodeKind::If || n.kind == NodeKind::While)
        add(n, 0, concept_of(n), "negate the condition of " + head_of(n));
    } else if (op == "drop-complement") {
      if (n.kind == NodeKind::Unary && n.text == "~")
        add(n, 0, ConceptId::BitwiseMask, "drop '~' in " + render_expression(*c.parent));
    } else if (op == "delete-statement") {
      if (in_block(c) && is_simple(n.kind) && movable(n) && !(in_block(c) && is_local_initialization(ast, n.id)))
        add(n, 0, concept_of(n), "delete " + head_of(n));
    } else if (op == "hoist-update") {
      bool body = in_block(c) && (n.kind == NodeKind::Assign || n.kind == NodeKind::IncDec) &&
                  c.index + 1 == c.parent->children.size() && c.parent->children.size() >= 2;
      if (body) {
        // the block must be the body of a compound statement that itself sits in a block
        for (const Ctx& p : all) {
          const Node& comp = *p.node;
          bool owns = (comp.kind == NodeKind::While || comp.kind == NodeKind::For ||
                       comp.kind == NodeKind::If) &&
                      &comp.children[comp.kind == NodeKind::If ? 1 : comp.children.size() - 1] ==
                          c.parent;
          if (owns && in_block(p)) {
            add(n, 0, concept_of(n), "move " + head_of(n) + " after " + head_of(comp));
            break;
          }
        }
      }
    } else if (op == "duplicate-statement") {
      if (in_block(c) && (n.kind == NodeKind::IncDec ||
                          (n.kind == NodeKind::Assign && n.text != "=")))
        add(n, 0, concept_of(n), "repeat " + head_of(n));
    } else if (op == "swap-adjacent") {
      if (in_block(c) && c.index + 1 < c.parent->children.size()) {
        const Node& next = c.parent->children[c.index + 1];
        if (movable(n) && movable(next) && dependent(effects(n, decls), effects(next, decls)))
          add(n, 0, concept_of(n), "swap " + head_of(n) + " and " + head_of(next));
      }
    } else if (op == "move-up") {
      if (in_block(c) && movable(n)) {
        Effects me = effects(n, decls);
        for (int k = 2; k <= 3; ++k) {
          if (c.index < static_cast<size_t>(k)) break;
          bool ok = true, dep = false;
          for (size_t j = c.index - k; j < c.index; ++j) {
            const Node& o = c.parent->children[j];
            if (!movable(o)) ok = false;
            if (dependent(me, effects(o, decls))) dep = true;
          }
          if (ok && dep)
            add(n, k, concept_of(n), "move " + head_of(n) + " up by " + std::to_string(k));
        }
      }
    } else if (op == "move-down") {
      if (in_block(c) && movable(n)) {
        Effects me = effects(n, decls);
        for (int k = 2; k <= 3; ++k) {
          if (c.index + k >= c.parent->children.size()) break;
          bool ok = true, dep = false;
          for (size_t j = c.index + 1; j <= c.index + k; ++j) {
            const Node& o = c.parent->children[j];
            if (!movable(o)) ok = false;
            if (dependent(me, effects(o, decls))) dep = true;
          }
          if (ok && dep)
            add(n, k, concept_of(n), "move " + head_of(n) + " down by " + std::to_string(k));
        }
      }
    }
  }
  return out;
}

// ---- application ------------------------------------------------------------------

struct Where {
  Node* node = nullptr;
  Node* parent = nullptr;
  size_t index = 0;
};

bool locate(Node& n, int id, Node* parent, size_t index, Where& w) {
  if (n.id == id) {
    w = {&n, parent, index};
    return true;
  }
  for (size_t i = 0; i < n.children.size(); ++i)
    if (locate(n.children[i], id, &n, i, w)) return true;
  return false;
}

bool locate_parent_of(Node& root, const Node* target, Where& w) {
  for (size_t i = 0; i < root.children.size(); ++i) {
    if (&root.children[i] == target) {
      w = {&root.children[i], &root, i};
      return true;
    }
    if (locate_parent_of(root.children[i], target, w)) return true;
  }
  return false;
}

Node rebuild_or(std::vector<Node> ds) {
  Node acc = std::move(ds[0]);
  for (size_t i = 1; i < ds.size(); ++i) {
    Node b;
    b.kind = NodeKind::Binary;
    b.text = "||";
    b.span = cover(acc.span, ds[i].span);
    b.children.push_back(std::move(acc));
    b.children.push_back(std::move(ds[i]));
    acc = std::move(b);
  }
  return acc;
}

void collect_disjuncts(Node&& e, std::vector<Node>& out) {
  if (e.kind == NodeKind::Binary && e.text == "||") {
    collect_disjuncts(std::move(e.children[0]), out);
    collect_disjuncts(std::move(e.children[1]), out);
  } else {
    out.push_back(std::move(e));
  }
}

[[noreturn]] void not_applicable(const MutationSite& s, const std::string& why) {
  throw OperatorNotApplicable("operator '" + s.op + "' not applicable at node " +
                              std::to_string(s.node_id) + ": " + why);
}

}  // namespace

std::vector<MutationSite> mutation_sites(const Ast& reference, const std::string& op) {
  if (!find_operator(op)) throw OperatorNotApplicable("unknown operator '" + op + "'");
  return sites_for(reference, op);
}

std::vector<MutationSite> category_sites(const Ast& reference, MutationCategory c) {
  std::vector<MutationSite> out;
  for (const auto& o : mutation_operators()) {
    if (o.category != c) continue;
    auto s = sites_for(reference, o.id);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

Ast mutated_ast(const Ast& reference, const MutationSite& site) {
  // validate against the current site list so stale sites are rejected
  auto valid = sites_for(reference, site.op);
  bool known = std::any_of(valid.begin(), valid.end(), [&](const MutationSite& s) {
    return s.node_id == site.node_id && s.variant == site.variant;
  });
  if (!known) not_applicable(site, "no such site");

  Ast m = reference;
  Where w;
  if (!locate(m.root, site.node_id, nullptr, 0, w)) not_applicable(site, "node not found");
  Node& n = *w.node;
  const std::string& op = site.op;

  if (op == "drop-type") {
    n.fault = RenderFault::DropType;
  } else if (op == "drop-semicolon") {
    n.fault = RenderFault::DropSemicolon;
  } else if (op == "drop-ampersand") {
    n.fault = RenderFault::DropAmpersand;
  } else if (op == "misspell-keyword") {
    n.fault = RenderFault::MisspellKeyword;
  } else if (op == "delete-init" || op == "delete-statement") {
    w.parent->children.erase(w.parent->children.begin() + static_cast<long>(w.index));
  } else if (op == "narrow-separators") {
    std::vector<Node> ds;
    collect_disjuncts(std::move(n.children[0]), ds);
    ds.erase(ds.begin() + site.variant);
    n.children[0] = rebuild_or(std::move(ds));
  } else if (op == "char-for-hex") {
    n.type.base = site.variant == 0 ? BaseType::Char : BaseType::UChar;
  } else if (op == "off-by-one-constant") {
    set_int_literal(n, n.int_value + (site.variant == 0 ? 1 : -1));
  } else if (op == "rescale-constant") {
    set_int_literal(n, site.variant == 0 ? n.int_value * 2 : n.int_value / 2);
  } else if (op == "relax-bound") {
    static const std::map<std::string, std::string> flip = {
        {"<", "<="}, {"<=", "<"}, {">", ">="}, {">=", ">"}};
    n.text = flip.at(n.text);
  } else if (op == "wrong-char") {
    char ch = n.text[0];
    char to = site.variant == 0   ? static_cast<char>(ch + 1)
              : site.variant == 1 ? static_cast<char>(ch - 1)
                                  : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (to == ch || to == '\\' || to == '\'' || to < 0x20 || to > 0x7e) to = '#';
    n.text = std::string(1, to);
    n.int_value = static_cast<unsigned char>(to);
  } else if (op == "no-overlap-reset") {
    auto& body = n.children[1].children;
    size_t k = static_cast<size_t>(site.variant);
    Node moved = std::move(body[k + 1]);
    body.erase(body.begin() + static_cast<long>(k + 1));
    Node blk;
    blk.kind = NodeKind::Block;
    blk.span = moved.span;
    blk.children.push_back(std::move(moved));
    body[k].children.push_back(std::move(blk));
  } else if (op == "mask-fixation") {
    n.text = site.variant == 0 ? "&" : "|";
  } else if (op == "operator-swap") {
    if (n.text == "+" || n.text == "-") {
      n.text = n.text == "+" ? "-" : "+";
    } else if (n.text == "<<" || n.text == ">>") {
      n.text = n.text == "<<" ? ">>" : "<<";
    } else {
      std::vector<std::string> others;
      for (const char* o : {"&", "|", "^"})
        if (n.text != o) others.push_back(o);
      n.text = others[static_cast<size_t>(site.variant)];
    }
  } else if (op == "negate-condition") {
    Node neg;
    neg.kind = NodeKind::Unary;
    neg.text = "!";
    neg.span = n.children[0].span;
    neg.children.push_back(std::move(n.children[0]));
    n.children[0] = std::move(neg);
  } else if (op == "drop-complement") {
    Node inner = std::move(n.children[0]);
    n = std::move(inner);
  } else if (op == "hoist-update") {
    Node* block = w.parent;
    Node moved = std::move(block->children[w.index]);
    block->children.erase(block->children.begin() + static_cast<long>(w.index));
    // find the compound owning this block, then its place in the enclosing block
    Where owner;
    if (!locate_parent_of(m.root, block, owner)) not_applicable(site, "no owner");
    Node* comp = owner.parent;
    Where outer;
    if (!locate_parent_of(m.root, comp, outer)) not_applicable(site, "no enclosing block");
    outer.parent->children.insert(outer.parent->children.begin() + static_cast<long>(outer.index) + 1,
                                  std::move(moved));
  } else if (op == "duplicate-statement") {
    Node copy = n;
    w.parent->children.insert(w.parent->children.begin() + static_cast<long>(w.index) + 1,
                              std::move(copy));
  } else if (op == "swap-adjacent") {
    std::swap(w.parent->children[w.index], w.parent->children[w.index + 1]);
  } else if (op == "move-up") {
    auto& kids = w.parent->children;
    Node moved = std::move(kids[w.index]);
    kids.erase(kids.begin() + static_cast<long>(w.index));
    kids.insert(kids.begin() + static_cast<long>(w.index) - site.variant, std::move(moved));
  } else if (op == "move-down") {
    auto& kids = w.parent->children;
    Node moved = std::move(kids[w.index]);
    kids.erase(kids.begin() + static_cast<long>(w.index));
    kids.insert(kids.begin() + static_cast<long>(w.index) + site.variant, std::move(moved));
  } else {
    not_applicable(site, "unknown operator");
  }
  number_nodes(m);
  return m;
}

Mutant apply_mutation(const Ast& reference, const MutationSite& site) {
  const OperatorInfo* info = find_operator(site.op);
  if (!info) throw OperatorNotApplicable("unknown operator '" + site.op + "'");
  Ast m = mutated_ast(reference, site);
  Mutant out;
  out.op = site.op;
  out.category = info->category;
  out.concept_id = site.concept_id;
  out.site = site;
  out.source = pretty_print(m);
  out.parses = parse(out.source).ok();
  return out;
}

Mutant mutate(const Ast& reference, const MutationSpec& spec) {
  std::vector<MutationSite> sites;
  if (spec.op.empty()) {
    sites = category_sites(reference, spec.category);
  } else {
    const OperatorInfo* info = find_operator(spec.op);
    if (!info) throw OperatorNotApplicable("unknown operator '" + spec.op + "'");
    if (info->category != spec.category)
      throw OperatorNotApplicable("operator '" + spec.op + "' is labeled " +
                                  mutation_category_name(info->category));
    sites = sites_for(reference, spec.op);
  }
  if (spec.target) {
    std::vector<MutationSite> narrowed;
    for (const auto& s : sites)
      if (s.concept_id == *spec.target) narrowed.push_back(s);
    sites = std::move(narrowed);
  }
  if (sites.empty())
    throw OperatorNotApplicable("no applicable site for " +
                                (spec.op.empty() ? std::string(mutation_category_name(spec.category))
                                                 : spec.op));
  std::mt19937_64 rng(spec.seed);
  return apply_mutation(reference, sites[rng() % sites.size()]);
}

RenameResult rename_variables(const Ast& reference, int count, std::uint64_t seed) {
  static const char* pool[] = {"tmp", "val", "acc", "idx", "flag", "cur", "prev", "res",
                               "cnt", "num", "aux", "pos", "len2", "bits", "ch", "w"};
  auto vars = collect_variables(reference);
  std::set<std::string> taken;
  for (const auto& v : vars) taken.insert(v.name);
  std::vector<size_t> order(vars.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  std::vector<std::string> names;
  for (const char* p : pool)
    if (!taken.count(p)) names.push_back(p);
  for (size_t i = names.size(); i > 1; --i) std::swap(names[i - 1], names[rng() % i]);

  std::map<int, std::string> new_name;  // decl id -> new name
  int n = std::min<int>({count, static_cast<int>(vars.size()), static_cast<int>(names.size())});
  for (int i = 0; i < n; ++i) new_name[vars[order[i]].decl_id] = names[i];

  auto decls = reference_decls(reference);
  RenameResult out;
  out.ast = reference;
  visit_mut(out.ast.root, [&](Node& x) {
    int d = x.kind == NodeKind::VarDecl ? x.id
            : (x.kind == NodeKind::VarRef && x.id >= 0 && x.id < static_cast<int>(decls.size()))
                ? decls[x.id]
                : -1;
    auto it = new_name.find(d);
    if (it != new_name.end()) x.text = it->second;
  });
  auto renamed = collect_variables(out.ast);
  for (const auto& r : renamed)
    for (const auto& v : vars)
      if (v.decl_id == r.decl_id) out.student_to_reference[r.key] = v.key;
  out.source = pretty_print(out.ast);
  return out;
}

}  // namespace cdiag
