#include <string>

#include "cdiag/parser.hpp"
#include "lexer.hpp"

namespace cdiag {

namespace {

std::string quoted(std::string_view payload, char q) {
  return q + detail::escape_c(payload, q) + q;
}

int binary_prec(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
  if (op == "<<" || op == ">>") return 8;
  if (op == "+" || op == "-") return 9;
  return 10;
}

int prec_of(const Node& e) {
  switch (e.kind) {
    case NodeKind::Binary: return binary_prec(e.text);
    case NodeKind::Unary:
    case NodeKind::AddrOf: return 11;
    default: return 13;
  }
}

void expr(const Node& e, std::string& out);

void expr_wrapped(const Node& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  expr(e, out);
  if (wrap) out += ')';
}

void read_args(const Node& n, size_t first, std::string& out) {
  for (size_t i = first; i < n.children.size(); ++i) {
    out += ", ";
    expr(n.children[i], out);
  }
}

void expr(const Node& e, std::string& out) {
  switch (e.kind) {
    case NodeKind::IntLit:
      out += e.text.empty() ? std::to_string(e.int_value) : e.text;
      return;
    case NodeKind::FloatLit:
      out += e.text.empty() ? std::to_string(e.float_value) : e.text;
      return;
    case NodeKind::CharLit:
      out += quoted(e.text, '\'');
      return;
    case NodeKind::VarRef:
      out += e.text;
      return;
    case NodeKind::Call:
      out += e.text + "()";
      return;
    case NodeKind::Index:
      expr(e.children[0], out);
      out += '[';
      expr(e.children[1], out);
      out += ']';
      return;
    case NodeKind::AddrOf:
      if (e.fault != RenderFault::DropAmpersand) out += '&';
      expr_wrapped(e.children[0], prec_of(e.children[0]) < 12, out);
      return;
    case NodeKind::Unary: {
      out += e.text;
      const Node& c = e.children[0];
      expr_wrapped(c, c.kind == NodeKind::Unary || prec_of(c) < 11, out);
      return;
    }
    case NodeKind::Binary: {
      int p = binary_prec(e.text);
      // extra parentheses where gcc's -Wparentheses would ask for them
      auto clarify = [&](const Node& c) {
        if (c.kind != NodeKind::Binary) return false;
        if (p == 1) return prec_of(c) == 2;
        return (p == 3 || p == 4 || p == 5 || p == 8) && prec_of(c) != p;
      };
      const Node& l = e.children[0];
      const Node& r = e.children[1];
      expr_wrapped(l, prec_of(l) < p || clarify(l), out);
      out += ' ' + e.text + ' ';
      expr_wrapped(r, prec_of(r) <= p || clarify(r), out);
      return;
    }
    case NodeKind::Fscanf:
      out += "fscanf(";
      expr(e.children[0], out);
      out += ", " + quoted(e.text, '"');
      read_args(e, 1, out);
      out += ')';
      return;
    default:
      out += "/*?*/";
  }
}

std::string keyword(const Node& n, const char* word) {
  if (n.fault != RenderFault::MisspellKeyword) return word;
  std::string w = word;
  if (w == "while") return "whlie";
  if (w == "if") return "fi";
  if (w == "for") return "fro";
  return w;
}

// Simple statement text without the terminating `;`.
std::string simple(const Node& s) {
  std::string out;
  switch (s.kind) {
    case NodeKind::Assign:
      expr(s.children[0], out);
      out += ' ' + s.text + ' ';
      expr(s.children[1], out);
      break;
    case NodeKind::IncDec:
      if (s.prefix) out += s.text;
      expr(s.children[0], out);
      if (!s.prefix) out += s.text;
      break;
    case NodeKind::Fopen:
      expr(s.children[0], out);
      out += " = fopen(" + quoted(s.text, '"') + ", " + quoted(s.aux, '"') +
             ")";
      break;
    case NodeKind::ExprStmt:
      expr(s.children[0], out);
      break;
    case NodeKind::Scanf:
      out += "scanf(" + quoted(s.text, '"');
      read_args(s, 0, out);
      out += ')';
      break;
    case NodeKind::Printf:
      out += "printf(" + quoted(s.text, '"');
      read_args(s, 0, out);
      out += ')';
      break;
    case NodeKind::Fclose:
      out += "fclose(";
      expr(s.children[0], out);
      out += ')';
      break;
    case NodeKind::Return:
      out += "return";
      if (!s.children.empty()) {
        out += ' ';
        expr(s.children[0], out);
      }
      break;
    case NodeKind::Break:
      out += "break";
      break;
    case NodeKind::VarDecl:
      if (s.fault == RenderFault::DropType) {
        out += "variable " + s.text;
      } else if (s.type.base == BaseType::File) {
        out += "FILE *" + s.text;
      } else {
        out += type_name(s.type.base) + ' ' + s.text;
      }
      if (s.type.is_array()) out += '[' + std::to_string(s.type.array_size) + ']';
      if (!s.children.empty()) {
        out += " = ";
        expr(s.children[0], out);
      }
      break;
    case NodeKind::Empty:
      break;
    default:
      out += "/*?*/";
  }
  return out;
}

std::string terminator(const Node& s) { return s.fault == RenderFault::DropSemicolon ? "" : ";"; }

std::string head(const Node& s) {
  switch (s.kind) {
    case NodeKind::If: return keyword(s, "if") + " (" + render_expression(s.children[0]) + ")";
    case NodeKind::While:
      return keyword(s, "while") + " (" + render_expression(s.children[0]) + ")";
    case NodeKind::For: {
      std::string cond =
          s.children[1].kind == NodeKind::Empty ? "" : " " + render_expression(s.children[1]);
      std::string step =
          s.children[2].kind == NodeKind::Empty ? "" : " " + simple(s.children[2]);
      return keyword(s, "for") + " (" + simple(s.children[0]) + ";" + cond + ";" + step + ")";
    }
    default: return "";
  }
}

void stmt(const Node& s, int depth, std::string& out);

void indent(int depth, std::string& out) { out.append(static_cast<size_t>(depth) * 2, ' '); }

void block_body(const Node& b, int depth, std::string& out) {
  out += "{\n";
  for (const auto& c : b.children) stmt(c, depth + 1, out);
  indent(depth, out);
  out += '}';
}

// Body of if/while/for: blocks stay on the header line, other statements
// go on their own indented line.
void body(const Node& b, int depth, std::string& out, bool trailing_newline) {
  if (b.kind == NodeKind::Block) {
    out += ' ';
    block_body(b, depth, out);
    if (trailing_newline) out += '\n';
  } else {
    out += '\n';
    stmt(b, depth + 1, out);
    if (!trailing_newline) indent(depth, out);
  }
}

void stmt(const Node& s, int depth, std::string& out) {
  switch (s.kind) {
    case NodeKind::Block:
      indent(depth, out);
      block_body(s, depth, out);
      out += '\n';
      return;
    case NodeKind::If: {
      indent(depth, out);
      const Node* cur = &s;
      while (true) {
        out += head(*cur);
        bool has_else = cur->children.size() > 2;
        body(cur->children[1], depth, out, !has_else);
        if (!has_else) return;
        if (cur->children[1].kind == NodeKind::Block) out += ' ';
        out += "else";
        const Node& e = cur->children[2];
        if (e.kind == NodeKind::If) {
          out += ' ';
          cur = &e;
          continue;
        }
        body(e, depth, out, true);
        return;
      }
    }
    case NodeKind::While:
    case NodeKind::For:
      indent(depth, out);
      out += head(s);
      body(s.children.back(), depth, out, true);
      return;
    default:
      indent(depth, out);
      out += simple(s) + terminator(s) + '\n';
  }
}

}  // namespace

std::string render_expression(const Node& e) {
  std::string out;
  expr(e, out);
  return out;
}

std::string render_statement_head(const Node& s) {
  switch (s.kind) {
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::For: return head(s);
    case NodeKind::Block: return "{ ... }";
    case NodeKind::Function: return type_name(s.type) + ' ' + s.text + "()";
    default:
      if (is_expression(s.kind)) return render_expression(s);
      return simple(s) + terminator(s);
  }
}

std::string pretty_print(const Ast& ast) {
  std::string out;
  bool prev_function = false;
  for (const auto& top : ast.root.children) {
    if (top.kind == NodeKind::Function) {
      if (!out.empty()) out += '\n';
      out += type_name(top.type) + ' ' + top.text + "() ";
      block_body(top.children[0], 0, out);
      out += '\n';
      prev_function = true;
    } else {
      if (prev_function) out += '\n';
      stmt(top, 0, out);
      prev_function = false;
    }
  }
  return out;
}

}  // namespace cdiag
