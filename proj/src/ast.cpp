#include "cdiag/ast.hpp"

#include <map>
#include <sstream>

namespace cdiag {

bool SourceSpan::contains(const SourceSpan& o) const {
  auto before = [](int l1, int c1, int l2, int c2) {
    return l1 < l2 || (l1 == l2 && c1 <= c2);
  };
  return file_id == o.file_id && before(start_line, start_col, o.start_line, o.start_col) &&
         before(o.end_line, o.end_col, end_line, end_col);
}

std::string SourceSpan::str() const {
  std::ostringstream os;
  os << start_line << ':' << start_col << '-' << end_line << ':' << end_col;
  return os.str();
}

SourceSpan cover(const SourceSpan& a, const SourceSpan& b) {
  if (!a.valid()) return b;
  if (!b.valid()) return a;
  SourceSpan s = a;
  if (b.start_line < s.start_line || (b.start_line == s.start_line && b.start_col < s.start_col)) {
    s.start_line = b.start_line;
    s.start_col = b.start_col;
  }
  if (b.end_line > s.end_line || (b.end_line == s.end_line && b.end_col > s.end_col)) {
    s.end_line = b.end_line;
    s.end_col = b.end_col;
  }
  return s;
}

std::string type_name(BaseType t) {
  switch (t) {
    case BaseType::Int: return "int";
    case BaseType::UInt: return "unsigned int";
    case BaseType::Char: return "char";
    case BaseType::UChar: return "unsigned char";
    case BaseType::Float: return "float";
    case BaseType::File: return "FILE *";
    case BaseType::Void: return "void";
  }
  return "?";
}

std::string type_name(const TypeSpec& t) {
  std::string s = type_name(t.base);
  if (t.is_array()) s += "[" + std::to_string(t.array_size) + "]";
  return s;
}

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Program: return "Program";
    case NodeKind::Function: return "Function";
    case NodeKind::Block: return "Block";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::Assign: return "Assign";
    case NodeKind::IncDec: return "IncDec";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::For: return "For";
    case NodeKind::Scanf: return "Scanf";
    case NodeKind::Printf: return "Printf";
    case NodeKind::Fopen: return "Fopen";
    case NodeKind::Fclose: return "Fclose";
    case NodeKind::Return: return "Return";
    case NodeKind::Break: return "Break";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::Empty: return "Empty";
    case NodeKind::IntLit: return "IntLit";
    case NodeKind::CharLit: return "CharLit";
    case NodeKind::FloatLit: return "FloatLit";
    case NodeKind::VarRef: return "VarRef";
    case NodeKind::Index: return "Index";
    case NodeKind::AddrOf: return "AddrOf";
    case NodeKind::Unary: return "Unary";
    case NodeKind::Binary: return "Binary";
    case NodeKind::Call: return "Call";
    case NodeKind::Fscanf: return "Fscanf";
  }
  return "?";
}

bool is_statement(NodeKind k) {
  switch (k) {
    case NodeKind::Block:
    case NodeKind::VarDecl:
    case NodeKind::Assign:
    case NodeKind::IncDec:
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::For:
    case NodeKind::Scanf:
    case NodeKind::Printf:
    case NodeKind::Fopen:
    case NodeKind::Fclose:
    case NodeKind::Return:
    case NodeKind::Break:
    case NodeKind::ExprStmt:
    case NodeKind::Empty:
      return true;
    default:
      return false;
  }
}

bool is_expression(NodeKind k) {
  return !is_statement(k) && k != NodeKind::Program && k != NodeKind::Function;
}

int Node::size() const {
  int n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.text != b.text || a.aux != b.aux || a.prefix != b.prefix ||
      a.int_value != b.int_value || a.float_value != b.float_value ||
      a.children.size() != b.children.size())
    return false;
  if ((a.kind == NodeKind::VarDecl || a.kind == NodeKind::Function) && !(a.type == b.type))
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

namespace {
void number_rec(Node& n, int& next) {
  n.id = next++;
  for (auto& c : n.children) number_rec(c, next);
}
}  // namespace

void number_nodes(Ast& ast) {
  int next = 0;
  number_rec(ast.root, next);
}

const Node* find_node(const Node& root, int id) {
  if (root.id == id) return &root;
  for (size_t i = 0; i < root.children.size(); ++i) {
    const Node& c = root.children[i];
    // preorder ids: the subtree of c spans [c.id, next sibling id)
    if (c.id > id) break;
    if (i + 1 < root.children.size() && root.children[i + 1].id <= id) continue;
    if (const Node* hit = find_node(c, id)) return hit;
  }
  return nullptr;
}

const Node* find_function(const Ast& ast, const std::string& name) {
  for (const auto& n : ast.root.children)
    if (n.kind == NodeKind::Function && n.text == name) return &n;
  return nullptr;
}

std::vector<int> kind_histogram(const Node& n) {
  std::vector<int> h(kNodeKindCount, 0);
  visit(n, [&](const Node& x) { ++h[static_cast<int>(x.kind)]; });
  return h;
}

int statement_count(const Node& n) {
  int count = 0;
  visit(n, [&](const Node& x) {
    if (is_statement(x.kind) && x.kind != NodeKind::Block) ++count;
  });
  return count;
}

namespace {
void collect_rec(const Node& n, const std::string& fn, std::vector<VariableInfo>& out) {
  if (n.kind == NodeKind::VarDecl) {
    VariableInfo v;
    v.name = n.text;
    v.function = fn;
    v.type = n.type;
    v.decl_id = n.id;
    v.span = n.span;
    out.push_back(v);
  }
  const std::string& inner = n.kind == NodeKind::Function ? n.text : fn;
  for (const auto& c : n.children) collect_rec(c, inner, out);
}
}  // namespace

std::vector<VariableInfo> collect_variables(const Ast& ast) {
  std::vector<VariableInfo> vars;
  collect_rec(ast.root, "", vars);
  std::map<std::string, int> uses;
  for (const auto& v : vars) ++uses[v.name];
  for (auto& v : vars)
    v.key = (uses[v.name] > 1 && !v.function.empty()) ? v.function + "." + v.name : v.name;
  return vars;
}

namespace {

void resolve_rec(const Node& n, std::vector<std::map<std::string, int>>& scopes,
                 std::vector<int>& out) {
  switch (n.kind) {
    case NodeKind::Function:
    case NodeKind::Block:
      scopes.emplace_back();
      for (const auto& c : n.children) resolve_rec(c, scopes, out);
      scopes.pop_back();
      return;
    case NodeKind::VarDecl:
      for (const auto& c : n.children) resolve_rec(c, scopes, out);
      scopes.back()[n.text] = n.id;
      return;
    case NodeKind::VarRef:
      for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto f = it->find(n.text);
        if (f != it->end()) {
          if (n.id >= 0 && n.id < static_cast<int>(out.size())) out[n.id] = f->second;
          return;
        }
      }
      return;
    default:
      for (const auto& c : n.children) resolve_rec(c, scopes, out);
  }
}

}  // namespace

std::vector<int> reference_decls(const Ast& ast) {
  std::vector<int> out(ast.root.size(), -1);
  std::vector<std::map<std::string, int>> scopes(1);
  resolve_rec(ast.root, scopes, out);
  return out;
}

namespace {

bool literal_expr(const Node& e) {
  if (e.kind == NodeKind::IntLit || e.kind == NodeKind::CharLit || e.kind == NodeKind::FloatLit)
    return true;
  return e.kind == NodeKind::Unary && e.text == "-" && literal_expr(e.children[0]);
}

const Node* enclosing_function(const Ast& ast, int id) {
  for (const auto& top : ast.root.children)
    if (top.kind == NodeKind::Function && id >= top.id && id < top.id + top.size()) return &top;
  return nullptr;
}

}  // namespace

bool is_local_initialization(const Ast& ast, int stmt_id) {
  const Node* s = find_node(ast.root, stmt_id);
  if (!s || s->kind != NodeKind::Assign || s->text != "=") return false;
  const Node& target = s->children[0];
  if (target.kind != NodeKind::VarRef || !literal_expr(s->children[1])) return false;
  const Node* fn = enclosing_function(ast, stmt_id);
  if (!fn) return false;
  auto decls = reference_decls(ast);
  int d = decls[target.id];
  if (d < fn->id || d >= fn->id + fn->size()) return false;
  const Node* decl = find_node(ast.root, d);
  if (!decl || !decl->children.empty() || decl->type.is_array()) return false;
  bool earlier = false;
  visit(*fn, [&](const Node& x) {
    if (x.id < stmt_id && x.kind == NodeKind::Assign && x.children[0].kind == NodeKind::VarRef &&
        decls[x.children[0].id] == d)
      earlier = true;
  });
  return !earlier;
}

}  // namespace cdiag
