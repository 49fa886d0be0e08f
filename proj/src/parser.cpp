#include <algorithm>
#include <map>
#include <set>

#include "cdiag/parser.hpp"
#include "lexer.hpp"

namespace cdiag {

std::string_view error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Lexical: return "lexical";
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Semantic: return "semantic";
  }
  return "?";
}

namespace {

using detail::Tok;
using detail::Token;

struct Abort {};  // unwinds to the nearest recovery point

struct FormatSpec {
  std::vector<char> conversions;
  std::string bad;  // first unsupported conversion, if any
};

FormatSpec scan_format(const std::string& fmt, bool allow_percent) {
  FormatSpec spec;
  for (size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') continue;
    if (i + 1 >= fmt.size()) {
      spec.bad = "%";
      break;
    }
    char c = fmt[++i];
    if (c == '%' && allow_percent) continue;
    if (std::string_view("duxcsf").find(c) == std::string_view::npos) {
      spec.bad = std::string("%") + c;
      break;
    }
    spec.conversions.push_back(c);
  }
  return spec;
}

bool anagram_of(std::string a, std::string b) {
  if (a == b || a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, int file_id, std::vector<ParseError>& errors)
      : toks_(std::move(toks)), file_id_(file_id), errors_(errors) {}

  Ast run() {
    Ast ast;
    ast.file_id = file_id_;
    ast.root.kind = NodeKind::Program;
    scopes_.emplace_back();  // globals
    SourceSpan first = peek().span;
    while (!at(Tok::End)) {
      try {
        parse_top_level(ast.root);
      } catch (const Abort&) {
        sync_top_level();
      }
    }
    ast.root.span = cover(first, toks_[pos_ > 0 ? pos_ - 1 : 0].span);
    for (const auto& [name, span] : pending_calls_)
      if (!functions_.count(name))
        semantic(span, "call to undefined function '" + name + "'", ConceptId::LoopControl);
    if (!functions_.count("main") && errors_.empty())
      semantic(ast.root.span, "missing main function", ConceptId::LoopControl);
    number_nodes(ast);
    return ast;
  }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& peek(int k = 0) const {
    size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_punct(std::string_view p, int k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool at_keyword(std::string_view p, int k = 0) const {
    return peek(k).kind == Tok::Keyword && peek(k).text == p;
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& prev() const { return toks_[pos_ > 0 ? pos_ - 1 : 0]; }

  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = peek();
    errors_.push_back({ErrorKind::Syntax, t.span,
                       "expected " + expected + " but found '" + t.text + "'", concept_});
    throw Abort{};
  }

  void semantic(const SourceSpan& s, std::string msg, ConceptId c) {
    errors_.push_back({ErrorKind::Semantic, s, std::move(msg), c});
  }

  const Token& expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("'" + std::string(p) + "'");
    return take();
  }

  const Token& expect_ident() {
    if (!at(Tok::Ident)) fail("identifier");
    return take();
  }

  // Panic mode: skip to the next `;` (consumed) or `}` (left in place).
  void sync_statement() {
    while (!at(Tok::End)) {
      if (at_punct(";")) {
        take();
        return;
      }
      if (at_punct("}")) return;
      if (at_punct("{")) {
        skip_braces();
        return;
      }
      take();
    }
  }

  void skip_braces() {
    int depth = 0;
    while (!at(Tok::End)) {
      if (at_punct("{")) ++depth;
      if (at_punct("}")) {
        --depth;
        take();
        if (depth == 0) return;
        continue;
      }
      take();
    }
  }

  void sync_top_level() {
    while (!at(Tok::End)) {
      if (at_punct(";")) {
        take();
        return;
      }
      if (at_punct("{")) {
        skip_braces();
        return;
      }
      if (at_punct("}")) {
        take();
        return;
      }
      take();
    }
  }

  // ---- scopes --------------------------------------------------------------
  const TypeSpec* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void declare(const std::string& name, const TypeSpec& t, const SourceSpan& s) {
    if (lookup(name) || functions_.count(name)) {
      semantic(s, "redeclaration of '" + name + "'", ConceptId::VariableDeclaration);
      return;
    }
    scopes_.back()[name] = t;
  }

  // ---- types ---------------------------------------------------------------
  bool at_type_start() const {
    return at_keyword("int") || at_keyword("unsigned") || at_keyword("char") ||
           at_keyword("float") || at_keyword("void") || at_keyword("FILE");
  }

  BaseType parse_base_type() {
    if (at_keyword("unsigned")) {
      take();
      if (at_keyword("char")) {
        take();
        return BaseType::UChar;
      }
      if (at_keyword("int")) take();
      return BaseType::UInt;
    }
    const Token& t = take();
    if (t.text == "int") return BaseType::Int;
    if (t.text == "char") return BaseType::Char;
    if (t.text == "float") return BaseType::Float;
    if (t.text == "void") return BaseType::Void;
    if (t.text == "FILE") {
      if (!at_punct("*")) fail("'*' after FILE");
      take();
      return BaseType::File;
    }
    fail("type");
  }

  // ---- top level -----------------------------------------------------------
  void parse_top_level(Node& program) {
    concept_ = ConceptId::VariableDeclaration;
    if (at_keyword("struct")) {
      semantic(peek().span, "unsupported construct: struct", ConceptId::VariableDeclaration);
      throw Abort{};
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::Ident) {
      missing_type();
      return;
    }
    if (!at_type_start()) fail("declaration or function definition");
    SourceSpan start = peek().span;
    BaseType base = parse_base_type();
    if (at(Tok::Ident) && at_punct("(", 1)) {
      parse_function(program, base, start);
      return;
    }
    if (base == BaseType::Void) {
      semantic(start, "variable declared void", ConceptId::VariableDeclaration);
      throw Abort{};
    }
    parse_declarators(program.children, base, start);
  }

  void missing_type() {
    const Token& first = take();
    const Token& second = take();
    semantic(cover(first.span, second.span),
             "missing type in declaration of '" + second.text + "'",
             ConceptId::VariableDeclaration);
    // keep later uses of the name from cascading into undeclared errors
    if (!lookup(second.text)) scopes_.back()[second.text] = TypeSpec{};
    sync_statement();
  }

  void parse_function(Node& program, BaseType ret, const SourceSpan& start) {
    const Token& name = take();
    if (functions_.count(name.text) || lookup(name.text))
      semantic(name.span, "redefinition of '" + name.text + "'", ConceptId::LoopControl);
    functions_.insert(name.text);
    expect_punct("(");
    if (at_keyword("void")) take();
    if (!at_punct(")")) {
      semantic(peek().span, "unsupported construct: function parameters", ConceptId::LoopControl);
      while (!at(Tok::End) && !at_punct(")")) take();
    }
    expect_punct(")");
    Node fn;
    fn.kind = NodeKind::Function;
    fn.text = name.text;
    fn.type = {ret, 0};
    if (!at_punct("{")) fail("'{'");
    fn.children.push_back(parse_block());
    fn.span = cover(start, prev().span);
    program.children.push_back(std::move(fn));
  }

  void parse_declarators(std::vector<Node>& out, BaseType base, const SourceSpan& start) {
    while (true) {
      if (at_punct("*") && base != BaseType::File) {
        semantic(peek().span, "unsupported construct: pointer", ConceptId::VariableDeclaration);
        throw Abort{};
      }
      const Token& name = expect_ident();
      Node d;
      d.kind = NodeKind::VarDecl;
      d.text = name.text;
      d.type = {base, 0};
      if (at_punct("[")) {
        take();
        if (!at(Tok::IntLit)) fail("array size");
        const Token& size = take();
        if (size.int_value <= 0 || size.int_value > 4096)
          semantic(size.span, "array size out of range", ConceptId::VariableDeclaration);
        d.type.array_size = static_cast<int>(std::clamp<std::int64_t>(size.int_value, 1, 4096));
        expect_punct("]");
      }
      if (at_punct("=")) {
        take();
        if (d.type.is_array()) {
          semantic(prev().span, "unsupported construct: array initializer",
                   ConceptId::VariableDeclaration);
          throw Abort{};
        }
        d.children.push_back(parse_expr());
      }
      d.span = cover(start, prev().span);
      declare(d.text, d.type, name.span);
      out.push_back(std::move(d));
      if (at_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(";");
    // extend every declarator of the group to cover the terminating ';'
    out.back().span = cover(out.back().span, prev().span);
  }

  // ---- statements ----------------------------------------------------------
  Node parse_block() {
    Node block;
    block.kind = NodeKind::Block;
    SourceSpan open = expect_punct("{").span;
    scopes_.emplace_back();
    while (!at_punct("}") && !at(Tok::End)) {
      try {
        parse_statement_into(block.children);
      } catch (const Abort&) {
        sync_statement();
      }
    }
    scopes_.pop_back();
    SourceSpan close = expect_punct("}").span;
    block.span = cover(open, close);
    return block;
  }

  void parse_statement_into(std::vector<Node>& out) {
    if (at_type_start()) {
      concept_ = ConceptId::VariableDeclaration;
      SourceSpan start = peek().span;
      BaseType base = parse_base_type();
      if (base == BaseType::Void) {
        semantic(start, "variable declared void", ConceptId::VariableDeclaration);
        throw Abort{};
      }
      parse_declarators(out, base, start);
      return;
    }
    out.push_back(parse_statement());
  }

  Node parse_statement() {
    if (at_punct("{")) return parse_block();
    if (at_punct(";")) {
      Node e;
      e.kind = NodeKind::Empty;
      e.span = take().span;
      return e;
    }
    if (at_keyword("if")) return parse_if();
    if (at_keyword("while")) return parse_while();
    if (at_keyword("for")) return parse_for();
    if (at_keyword("return")) return parse_return();
    if (at_keyword("break")) return parse_break();
    if (at_keyword("do") || at_keyword("struct")) {
      semantic(peek().span, "unsupported construct: " + peek().text, ConceptId::LoopControl);
      throw Abort{};
    }
    if (at_type_start()) {
      semantic(peek().span, "declaration not allowed here", ConceptId::VariableDeclaration);
      throw Abort{};
    }
    if (at(Tok::Ident)) {
      const std::string& name = peek().text;
      if (peek(1).kind == Tok::Ident) {
        concept_ = ConceptId::VariableDeclaration;
        missing_type();
        Node e;
        e.kind = NodeKind::Empty;
        e.span = prev().span;
        return e;
      }
      if (at_punct("(", 1) && !functions_.count(name) && name != "scanf" && name != "printf" &&
          name != "fclose" && name != "fscanf" && name != "fopen") {
        for (std::string_view kw : {"while", "if", "for"}) {
          if (anagram_of(name, std::string(kw))) {
            ConceptId c = kw == "if" ? ConceptId::IfCondition : ConceptId::LoopControl;
            semantic(peek().span,
                     "unknown keyword '" + name + "' (did you mean '" + std::string(kw) + "'?)",
                     c);
            // recover by reading it as the intended keyword
            if (kw == "while") return parse_while();
            if (kw == "if") return parse_if();
            return parse_for();
          }
        }
      }
      if (name == "scanf") return parse_scanf();
      if (name == "printf") return parse_printf();
      if (name == "fclose") return parse_fclose();
    }
    Node s = parse_simple();
    expect_punct(";");
    s.span = cover(s.span, prev().span);
    return s;
  }

  Node parse_if() {
    concept_ = ConceptId::IfCondition;
    Node n;
    n.kind = NodeKind::If;
    SourceSpan start = take().span;
    expect_punct("(");
    n.children.push_back(parse_expr());
    expect_punct(")");
    n.children.push_back(parse_statement());
    if (at_keyword("else")) {
      take();
      n.children.push_back(parse_statement());
    }
    n.span = cover(start, prev().span);
    return n;
  }

  Node parse_while() {
    concept_ = ConceptId::LoopControl;
    Node n;
    n.kind = NodeKind::While;
    SourceSpan start = take().span;
    expect_punct("(");
    n.children.push_back(parse_expr());
    expect_punct(")");
    ++loop_depth_;
    n.children.push_back(parse_statement());
    --loop_depth_;
    n.span = cover(start, prev().span);
    return n;
  }

  Node parse_for() {
    concept_ = ConceptId::LoopControl;
    Node n;
    n.kind = NodeKind::For;
    SourceSpan start = take().span;
    expect_punct("(");
    auto empty_at = [&](const SourceSpan& s) {
      Node e;
      e.kind = NodeKind::Empty;
      e.span = s;
      return e;
    };
    n.children.push_back(at_punct(";") ? empty_at(peek().span) : parse_simple());
    expect_punct(";");
    n.children.push_back(at_punct(";") ? empty_at(peek().span) : parse_expr());
    expect_punct(";");
    n.children.push_back(at_punct(")") ? empty_at(peek().span) : parse_simple());
    expect_punct(")");
    ++loop_depth_;
    n.children.push_back(parse_statement());
    --loop_depth_;
    n.span = cover(start, prev().span);
    return n;
  }

  Node parse_return() {
    concept_ = ConceptId::LoopControl;
    Node n;
    n.kind = NodeKind::Return;
    SourceSpan start = take().span;
    if (!at_punct(";")) n.children.push_back(parse_expr());
    expect_punct(";");
    n.span = cover(start, prev().span);
    return n;
  }

  Node parse_break() {
    concept_ = ConceptId::LoopControl;
    Node n;
    n.kind = NodeKind::Break;
    SourceSpan start = take().span;
    if (loop_depth_ == 0) semantic(start, "break outside of a loop", ConceptId::LoopControl);
    expect_punct(";");
    n.span = cover(start, prev().span);
    return n;
  }

  // `&x`, `&a[i]` or a bare char array for %s.
  Node parse_read_target() {
    if (at_punct("&")) {
      SourceSpan amp = take().span;
      Node lv = parse_postfix();
      if (lv.kind != NodeKind::VarRef && lv.kind != NodeKind::Index) {
        semantic(lv.span, "read target must be a variable", ConceptId::InputRead);
      }
      Node a;
      a.kind = NodeKind::AddrOf;
      a.span = cover(amp, lv.span);
      a.children.push_back(std::move(lv));
      return a;
    }
    return parse_expr();
  }

  TypeSpec static_type(const Node& e) const {
    switch (e.kind) {
      case NodeKind::VarRef: {
        const TypeSpec* t = lookup(e.text);
        return t ? *t : TypeSpec{BaseType::Int, 0};
      }
      case NodeKind::Index: {
        TypeSpec t = static_type(e.children[0]);
        t.array_size = 0;
        return t;
      }
      case NodeKind::AddrOf: return static_type(e.children[0]);
      case NodeKind::FloatLit: return {BaseType::Float, 0};
      case NodeKind::Binary: {
        TypeSpec a = static_type(e.children[0]);
        TypeSpec b = static_type(e.children[1]);
        if (a.base == BaseType::Float || b.base == BaseType::Float) return {BaseType::Float, 0};
        return {BaseType::Int, 0};
      }
      case NodeKind::Unary: return static_type(e.children[0]);
      default: return {BaseType::Int, 0};
    }
  }

  void check_read_targets(const std::string& fmt, const std::vector<Node>& targets,
                          size_t first, const SourceSpan& where) {
    FormatSpec spec = scan_format(fmt, false);
    if (!spec.bad.empty()) {
      semantic(where, "unsupported format specifier " + spec.bad, ConceptId::InputRead);
      return;
    }
    if (spec.conversions.size() != targets.size() - first) {
      semantic(where, "format expects " + std::to_string(spec.conversions.size()) +
                          " argument(s) but " + std::to_string(targets.size() - first) +
                          " given",
               ConceptId::InputRead);
      return;
    }
    for (size_t i = 0; i < spec.conversions.size(); ++i) {
      const Node& t = targets[first + i];
      char conv = spec.conversions[i];
      TypeSpec ty = static_type(t);
      if (conv == 's') {
        if (t.kind != NodeKind::VarRef || !ty.is_array() || !ty.is_char())
          semantic(t.span, "%s needs a char array argument", ConceptId::InputRead);
        continue;
      }
      if (t.kind != NodeKind::AddrOf) {
        semantic(t.span, "read argument must be an address (&name)", ConceptId::InputRead);
        continue;
      }
      if (ty.is_array()) {
        semantic(t.span, "cannot read into a whole array", ConceptId::InputRead);
      } else if (conv == 'f' && ty.base != BaseType::Float) {
        semantic(t.span, "%f needs a float variable", ConceptId::InputRead);
      } else if (conv == 'c' && !ty.is_char()) {
        semantic(t.span, "%c needs a char variable", ConceptId::InputRead);
      } else if ((conv == 'd' || conv == 'u' || conv == 'x') && !ty.is_integer()) {
        semantic(t.span, std::string("%") + conv + " needs an integer variable",
                 ConceptId::InputRead);
      }
    }
  }

  Node parse_scanf() {
    concept_ = ConceptId::InputRead;
    Node n;
    n.kind = NodeKind::Scanf;
    SourceSpan start = take().span;
    expect_punct("(");
    if (!at(Tok::StringLit)) fail("format string");
    const Token& fmt = take();
    n.text = fmt.text;
    while (at_punct(",")) {
      take();
      n.children.push_back(parse_read_target());
    }
    expect_punct(")");
    expect_punct(";");
    n.span = cover(start, prev().span);
    check_read_targets(n.text, n.children, 0, fmt.span);
    return n;
  }

  Node parse_fscanf() {
    Node n;
    n.kind = NodeKind::Fscanf;
    SourceSpan start = take().span;
    expect_punct("(");
    Node handle = parse_primary();
    if (handle.kind != NodeKind::VarRef || static_type(handle).base != BaseType::File)
      semantic(handle.span, "fscanf needs a FILE * handle", ConceptId::InputRead);
    n.children.push_back(std::move(handle));
    expect_punct(",");
    if (!at(Tok::StringLit)) fail("format string");
    const Token& fmt = take();
    n.text = fmt.text;
    while (at_punct(",")) {
      take();
      n.children.push_back(parse_read_target());
    }
    expect_punct(")");
    n.span = cover(start, prev().span);
    check_read_targets(n.text, n.children, 1, fmt.span);
    return n;
  }

  Node parse_printf() {
    concept_ = ConceptId::OutputWrite;
    Node n;
    n.kind = NodeKind::Printf;
    SourceSpan start = take().span;
    expect_punct("(");
    if (!at(Tok::StringLit)) fail("format string");
    const Token& fmt = take();
    n.text = fmt.text;
    while (at_punct(",")) {
      take();
      n.children.push_back(parse_expr());
    }
    expect_punct(")");
    expect_punct(";");
    n.span = cover(start, prev().span);
    FormatSpec spec = scan_format(n.text, true);
    if (!spec.bad.empty()) {
      semantic(fmt.span, "unsupported format specifier " + spec.bad, ConceptId::OutputWrite);
    } else if (spec.conversions.size() != n.children.size()) {
      semantic(fmt.span, "format expects " + std::to_string(spec.conversions.size()) +
                             " argument(s) but " + std::to_string(n.children.size()) + " given",
               ConceptId::OutputWrite);
    } else {
      for (size_t i = 0; i < spec.conversions.size(); ++i) {
        TypeSpec ty = static_type(n.children[i]);
        bool is_str = spec.conversions[i] == 's';
        bool arr = ty.is_array() && n.children[i].kind == NodeKind::VarRef;
        if (is_str != arr || (is_str && !ty.is_char()))
          semantic(n.children[i].span,
                   is_str ? "%s needs a char array argument" : "array used as a scalar",
                   ConceptId::OutputWrite);
      }
    }
    return n;
  }

  Node parse_fclose() {
    concept_ = ConceptId::FileOpen;
    Node n;
    n.kind = NodeKind::Fclose;
    SourceSpan start = take().span;
    expect_punct("(");
    Node h = parse_primary();
    if (h.kind != NodeKind::VarRef || static_type(h).base != BaseType::File)
      semantic(h.span, "fclose needs a FILE * handle", ConceptId::FileOpen);
    n.children.push_back(std::move(h));
    expect_punct(")");
    expect_punct(";");
    n.span = cover(start, prev().span);
    return n;
  }

  static bool is_assign_op(const Token& t) {
    static const std::set<std::string> ops = {"=",  "+=", "-=",  "*=",  "/=", "%=",
                                              "&=", "|=", "^=", "<<=", ">>="};
    return t.kind == Tok::Punct && ops.count(t.text);
  }

  void check_lvalue(const Node& lv) {
    if (lv.kind != NodeKind::VarRef && lv.kind != NodeKind::Index) {
      semantic(lv.span, "assignment target must be a variable", concept_);
      return;
    }
    if (lv.kind == NodeKind::VarRef && static_type(lv).is_array())
      semantic(lv.span, "cannot assign to a whole array", ConceptId::ArrayIndex);
  }

  // Assignment, increment, fopen assignment or call; no trailing `;`.
  Node parse_simple() {
    concept_ = ConceptId::AccumulatorUpdate;
    if (at_punct("++") || at_punct("--")) {
      Node n;
      n.kind = NodeKind::IncDec;
      const Token& op = take();
      n.text = op.text;
      n.prefix = true;
      Node lv = parse_postfix();
      check_lvalue(lv);
      n.span = cover(op.span, lv.span);
      n.children.push_back(std::move(lv));
      return n;
    }
    Node lhs = parse_expr();
    if (is_assign_op(peek())) {
      check_lvalue(lhs);
      const Token& op = take();
      if (op.text == "=" && at(Tok::Ident) && peek().text == "fopen") {
        concept_ = ConceptId::FileOpen;
        return parse_fopen(std::move(lhs));
      }
      Node n;
      n.kind = NodeKind::Assign;
      n.text = op.text;
      Node rhs = parse_expr();
      n.span = cover(lhs.span, rhs.span);
      n.children.push_back(std::move(lhs));
      n.children.push_back(std::move(rhs));
      return n;
    }
    if (at_punct("++") || at_punct("--")) {
      check_lvalue(lhs);
      Node n;
      n.kind = NodeKind::IncDec;
      const Token& op = take();
      n.text = op.text;
      n.span = cover(lhs.span, op.span);
      n.children.push_back(std::move(lhs));
      return n;
    }
    if (lhs.kind == NodeKind::Call || lhs.kind == NodeKind::Fscanf) {
      Node n;
      n.kind = NodeKind::ExprStmt;
      n.span = lhs.span;
      n.children.push_back(std::move(lhs));
      return n;
    }
    fail("assignment or call");
  }

  Node parse_fopen(Node handle) {
    if (static_type(handle).base != BaseType::File)
      semantic(handle.span, "fopen result must be stored in a FILE * variable",
               ConceptId::FileOpen);
    take();  // fopen
    expect_punct("(");
    if (!at(Tok::StringLit)) fail("file name string");
    std::string filename = take().text;
    expect_punct(",");
    if (!at(Tok::StringLit)) fail("mode string");
    const Token& mode = take();
    if (mode.text != "r" && mode.text != "w" && mode.text != "a")
      semantic(mode.span, "unsupported fopen mode \"" + mode.text + "\"", ConceptId::FileOpen);
    expect_punct(")");
    Node n;
    n.kind = NodeKind::Fopen;
    n.text = filename;
    n.aux = mode.text;
    n.span = cover(handle.span, prev().span);
    n.children.push_back(std::move(handle));
    return n;
  }

  // ---- expressions ---------------------------------------------------------
  static int precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
    if (op == "<<" || op == ">>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return -1;
  }

  Node parse_expr() { return parse_binary(1); }

  Node parse_binary(int min_prec) {
    Node lhs = parse_unary();
    while (peek().kind == Tok::Punct) {
      int p = precedence(peek().text);
      if (p < min_prec) break;
      std::string op = take().text;
      Node rhs = parse_binary(p + 1);
      Node n;
      n.kind = NodeKind::Binary;
      n.text = op;
      n.span = cover(lhs.span, rhs.span);
      n.children.push_back(std::move(lhs));
      n.children.push_back(std::move(rhs));
      lhs = std::move(n);
    }
    return lhs;
  }

  Node parse_unary() {
    if (at_punct("-") || at_punct("!") || at_punct("~")) {
      const Token& op = take();
      Node operand = parse_unary();
      Node n;
      n.kind = NodeKind::Unary;
      n.text = op.text;
      n.span = cover(op.span, operand.span);
      n.children.push_back(std::move(operand));
      return n;
    }
    if (at_punct("*") || at_punct("&")) {
      semantic(peek().span, "unsupported construct: pointer", concept_);
      take();
      return parse_unary();
    }
    if (at_punct("++") || at_punct("--")) {
      semantic(peek().span, "increment inside an expression is not supported", concept_);
      take();
      return parse_unary();
    }
    return parse_postfix();
  }

  Node parse_postfix() {
    Node base = parse_primary();
    while (at_punct("[")) {
      take();
      Node idx = parse_expr();
      expect_punct("]");
      if (base.kind != NodeKind::VarRef || !static_type(base).is_array())
        semantic(base.span, "subscripted value is not an array", ConceptId::ArrayIndex);
      Node n;
      n.kind = NodeKind::Index;
      n.span = cover(base.span, prev().span);
      n.children.push_back(std::move(base));
      n.children.push_back(std::move(idx));
      base = std::move(n);
    }
    if (at_punct("->") || at_punct(".")) {
      semantic(peek().span, "unsupported construct: member access", concept_);
      throw Abort{};
    }
    return base;
  }

  Node parse_primary() {
    const Token& t = peek();
    Node n;
    n.span = t.span;
    switch (t.kind) {
      case Tok::IntLit:
        take();
        n.kind = NodeKind::IntLit;
        n.text = t.spelling;
        n.int_value = t.int_value;
        return n;
      case Tok::FloatLit:
        take();
        n.kind = NodeKind::FloatLit;
        n.text = t.spelling;
        n.float_value = t.float_value;
        return n;
      case Tok::CharLit:
        take();
        n.kind = NodeKind::CharLit;
        n.text = t.text;
        n.int_value = t.int_value;
        return n;
      case Tok::StringLit:
        semantic(t.span, "string literal not allowed in an expression", concept_);
        take();
        n.kind = NodeKind::IntLit;
        n.text = "0";
        return n;
      case Tok::Ident: {
        if (t.text == "NULL" || t.text == "EOF") {
          take();
          n.kind = NodeKind::IntLit;
          n.text = t.text;
          n.int_value = t.text == "EOF" ? -1 : 0;
          return n;
        }
        if (t.text == "fscanf") {
          concept_ = ConceptId::InputRead;
          return parse_fscanf();
        }
        if (t.text == "scanf" || t.text == "printf" || t.text == "fopen" || t.text == "fclose") {
          semantic(t.span, t.text + " is only supported as a statement", concept_);
          throw Abort{};
        }
        take();
        if (at_punct("(")) {
          take();
          if (!at_punct(")")) {
            semantic(peek().span, "unsupported construct: call arguments", concept_);
            throw Abort{};
          }
          expect_punct(")");
          n.kind = NodeKind::Call;
          n.text = t.text;
          n.span = cover(t.span, prev().span);
          pending_calls_.emplace_back(t.text, n.span);
          return n;
        }
        n.kind = NodeKind::VarRef;
        n.text = t.text;
        if (!lookup(t.text))
          semantic(t.span, "undeclared identifier '" + t.text + "'", concept_);
        return n;
      }
      case Tok::Punct:
        if (t.text == "(") {
          take();
          Node inner = parse_expr();
          expect_punct(")");
          return inner;
        }
        break;
      default:
        break;
    }
    fail("expression");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  int file_id_;
  std::vector<ParseError>& errors_;
  std::vector<std::map<std::string, TypeSpec>> scopes_;
  std::set<std::string> functions_;
  std::vector<std::pair<std::string, SourceSpan>> pending_calls_;
  int loop_depth_ = 0;
  ConceptId concept_ = ConceptId::LoopControl;
};

}  // namespace

ParseResult parse(std::string_view source, int file_id) {
  ParseResult r;
  auto toks = detail::tokenize(source, file_id, r.errors);
  r.ast = Parser(std::move(toks), file_id, r.errors).run();
  return r;
}

}  // namespace cdiag
