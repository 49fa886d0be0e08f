// Span-annotated AST for the pedagogical C subset.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdiag {

/// 1-based source region. An all-zero span marks a synthesized node.
struct SourceSpan {
  int file_id = 0;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool valid() const { return start_line > 0; }
  bool contains(const SourceSpan& other) const;
  std::string str() const;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Merge two spans into the smallest span covering both.
SourceSpan cover(const SourceSpan& a, const SourceSpan& b);

enum class BaseType { Int, UInt, Char, UChar, Float, File, Void };

struct TypeSpec {
  BaseType base = BaseType::Int;
  int array_size = 0;  // 0 for scalars

  bool is_array() const { return array_size > 0; }
  bool is_integer() const {
    return base == BaseType::Int || base == BaseType::UInt ||
           base == BaseType::Char || base == BaseType::UChar;
  }
  bool is_char() const { return base == BaseType::Char || base == BaseType::UChar; }

  friend bool operator==(const TypeSpec&, const TypeSpec&) = default;
};

std::string type_name(BaseType t);
std::string type_name(const TypeSpec& t);

enum class NodeKind {
  // top level
  Program,
  Function,
  // statements
  Block,
  VarDecl,
  Assign,
  IncDec,
  If,
  While,
  For,
  Scanf,
  Printf,
  Fopen,
  Fclose,
  Return,
  Break,
  ExprStmt,
  Empty,
  // expressions
  IntLit,
  CharLit,
  FloatLit,
  VarRef,
  Index,
  AddrOf,
  Unary,
  Binary,
  Call,
  Fscanf,
};

inline constexpr int kNodeKindCount = static_cast<int>(NodeKind::Fscanf) + 1;

const char* kind_name(NodeKind k);
bool is_statement(NodeKind k);
bool is_expression(NodeKind k);

/// Rendering faults used by the mutation corpus to emit labeled non-parsing
/// text. They never affect structural equality.
enum class RenderFault : std::uint8_t {
  None,
  DropType,        // `variable value;`
  DropSemicolon,   // statement without its terminating `;`
  DropAmpersand,   // `scanf("%d", p)`
  MisspellKeyword  // `whlie`, `fi`, `fro`
};

/// One AST node. Children layout per kind:
///   Program   : Function | VarDecl ...
///   Function  : [Block]                  text=name, type=return type
///   Block     : statements
///   VarDecl   : [init?]                  text=name, type
///   Assign    : [lvalue, expr]           text=operator ("=", "+=", ...)
///   IncDec    : [lvalue]                 text="++"|"--", prefix
///   If        : [cond, then, else?]
///   While     : [cond, body]
///   For       : [init, cond, step, body] (Empty for omitted parts)
///   Scanf     : targets (AddrOf or array VarRef)      text=format
///   Printf    : args                      text=format
///   Fopen     : [VarRef handle]          text=filename, aux=mode
///   Fclose    : [VarRef handle]
///   Return    : [expr?]
///   ExprStmt  : [expr]
///   Index     : [VarRef array, expr]
///   AddrOf    : [lvalue]
///   Unary     : [expr]                   text=operator
///   Binary    : [lhs, rhs]               text=operator
///   Call      : []                       text=function name
///   Fscanf    : [VarRef handle, targets...] text=format
///   IntLit    : text=spelling (may be "NULL"/"EOF"), int_value
struct Node {
  NodeKind kind = NodeKind::Empty;
  SourceSpan span;
  std::string text;
  std::string aux;
  TypeSpec type;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  bool prefix = false;
  int id = -1;  // preorder index, assigned by number_nodes()
  RenderFault fault = RenderFault::None;
  std::vector<Node> children;

  /// Number of nodes in this subtree.
  int size() const;
};

/// Structural equality: kinds, texts, types, literal values and children.
/// Spans, ids and render faults are ignored.
bool structurally_equal(const Node& a, const Node& b);

struct Ast {
  Node root;  // kind == Program
  int file_id = 0;
};

/// Assign preorder ids to every node.
void number_nodes(Ast& ast);

/// Locate a node by preorder id, or nullptr.
const Node* find_node(const Node& root, int id);

/// Locate the function definition with the given name, or nullptr.
const Node* find_function(const Ast& ast, const std::string& name);

/// Visit every node in preorder.
template <typename F>
void visit(const Node& n, F&& f) {
  f(n);
  for (const auto& c : n.children) visit(c, f);
}

template <typename F>
void visit_mut(Node& n, F&& f) {
  f(n);
  for (auto& c : n.children) visit_mut(c, f);
}

/// Histogram of node kinds, indexed by NodeKind.
std::vector<int> kind_histogram(const Node& n);

/// Number of statement nodes (excluding Program/Function/Block wrappers).
int statement_count(const Node& n);

/// Declared variable as seen from the whole program.
struct VariableInfo {
  std::string key;       // unique key: name, or "fn.name" on collisions
  std::string name;
  std::string function;  // empty for globals
  TypeSpec type;
  int decl_id = -1;
  SourceSpan span;
};

/// All variable declarations in declaration order.
std::vector<VariableInfo> collect_variables(const Ast& ast);

/// For every node id, the id of the VarDecl a VarRef resolves to under block
/// scoping, or -1 (non-VarRef nodes and unresolved names).
std::vector<int> reference_decls(const Ast& ast);

/// True for `x = <literal>;` when it is the first assignment to the local
/// scalar `x` inside its function.
bool is_local_initialization(const Ast& ast, int stmt_id);

}  // namespace cdiag
