#include "cdiag/interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <limits>
#include <map>

namespace cdiag {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::StepLimitExceeded: return "step-limit-exceeded";
    case Outcome::RuntimeError: return "runtime-error";
  }
  return "?";
}

const char* runtime_error_name(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::None: return "none";
    case RuntimeErrorKind::DivisionByZero: return "division-by-zero";
    case RuntimeErrorKind::ArrayOutOfBounds: return "array-out-of-bounds";
    case RuntimeErrorKind::ReadPastInput: return "read-past-input";
    case RuntimeErrorKind::FormatMismatch: return "format-mismatch";
    case RuntimeErrorKind::UninitializedRead: return "uninitialized-read";
    case RuntimeErrorKind::InvalidFile: return "invalid-file";
  }
  return "?";
}

bool values_equal(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::fabs(a - b) <= 1e-9;
}

std::optional<double> ExecutionTrace::final_value(const std::string& name) const {
  for (const auto& v : final_vars) {
    if (v.var >= 0 && v.var < static_cast<int>(variables.size()) && variables[v.var].name == name &&
        !v.values.empty())
      return v.values[0];
  }
  return std::nullopt;
}

std::string stdin_text(const TestCase& t) {
  std::string s;
  for (size_t i = 0; i < t.stdin_tokens.size(); ++i) {
    if (i) s += '\n';
    s += t.stdin_tokens[i];
  }
  return s;
}

namespace {

constexpr double kUninit = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxCallDepth = 512;

struct Fault {
  RuntimeErrorKind kind;
  SourceSpan span;
  std::string message;
};
struct StepLimit {
  std::string message;
};

enum class VK { I, U, F };

struct RV {
  VK k = VK::I;
  std::int64_t i = 0;
  double f = 0.0;
};

std::int64_t wrap_i32(std::int64_t x) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(static_cast<std::uint64_t>(x)));
}
std::int64_t wrap_u32(std::int64_t x) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(x) & 0xffffffffu);
}

RV make_int(std::int64_t x) { return {VK::I, wrap_i32(x), 0.0}; }

bool truthy(const RV& v) { return v.k == VK::F ? v.f != 0.0 : v.i != 0; }

double as_double(const RV& v) { return v.k == VK::F ? v.f : static_cast<double>(v.i); }

std::int64_t as_int(const RV& v) {
  if (v.k != VK::F) return v.i;
  if (!std::isfinite(v.f)) return 0;
  double t = std::trunc(v.f);
  if (t > 9e18 || t < -9e18) return 0;
  return static_cast<std::int64_t>(t);
}

double convert_for_store(const RV& v, BaseType t) {
  if (t == BaseType::Float) return static_cast<double>(static_cast<float>(as_double(v)));
  std::int64_t x = as_int(v);
  switch (t) {
    case BaseType::Char: return static_cast<double>(static_cast<std::int8_t>(x & 0xff));
    case BaseType::UChar: return static_cast<double>(x & 0xff);
    case BaseType::UInt: return static_cast<double>(wrap_u32(x));
    default: return static_cast<double>(wrap_i32(x));
  }
}

RV load_value(double v, BaseType t) {
  if (t == BaseType::Float) return {VK::F, 0, v};
  if (t == BaseType::UInt) return {VK::U, static_cast<std::int64_t>(v), 0.0};
  return {VK::I, static_cast<std::int64_t>(v), 0.0};
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Static facts about a program shared by every run.
struct ProgramIndex {
  std::vector<const Node*> by_id;
  std::vector<int> parent;
  std::vector<int> decl_of;      // VarRef id -> VarDecl id
  std::vector<int> var_of_decl;  // VarDecl id -> variable index
  std::vector<int> function_of;  // node id -> enclosing Function id (-1 for globals)
  std::map<std::string, const Node*> functions;
  std::vector<const Node*> globals;
  std::vector<VariableInfo> variables;

  explicit ProgramIndex(const Ast& ast) {
    int n = ast.root.size();
    by_id.assign(n, nullptr);
    parent.assign(n, -1);
    decl_of.assign(n, -1);
    var_of_decl.assign(n, -1);
    function_of.assign(n, -1);
    variables = collect_variables(ast);
    for (size_t i = 0; i < variables.size(); ++i)
      if (variables[i].decl_id >= 0 && variables[i].decl_id < n)
        var_of_decl[variables[i].decl_id] = static_cast<int>(i);
    std::vector<std::map<std::string, int>> scopes(1);
    index(ast.root, -1, -1, scopes);
  }

  void index(const Node& node, int par, int fn, std::vector<std::map<std::string, int>>& scopes) {
    if (node.id < 0 || node.id >= static_cast<int>(by_id.size())) return;
    by_id[node.id] = &node;
    parent[node.id] = par;
    function_of[node.id] = fn;
    switch (node.kind) {
      case NodeKind::Program:
        for (const auto& c : node.children) {
          if (c.kind == NodeKind::Function) functions[c.text] = &c;
          if (c.kind == NodeKind::VarDecl) globals.push_back(&c);
        }
        for (const auto& c : node.children) index(c, node.id, fn, scopes);
        return;
      case NodeKind::Function:
        scopes.emplace_back();
        for (const auto& c : node.children) index(c, node.id, node.id, scopes);
        scopes.pop_back();
        return;
      case NodeKind::Block:
        scopes.emplace_back();
        for (const auto& c : node.children) index(c, node.id, fn, scopes);
        scopes.pop_back();
        return;
      case NodeKind::VarDecl:
        for (const auto& c : node.children) index(c, node.id, fn, scopes);
        scopes.back()[node.text] = node.id;
        return;
      case NodeKind::VarRef:
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
          auto f = it->find(node.text);
          if (f != it->end()) {
            decl_of[node.id] = f->second;
            break;
          }
        }
        return;
      default:
        for (const auto& c : node.children) index(c, node.id, fn, scopes);
    }
  }
};

struct Cell {
  const Node* decl = nullptr;
  std::vector<double> v;
};

struct Frame {
  const Node* fn = nullptr;
  std::map<int, int> slot;  // decl id -> cell index
  std::vector<int> live;    // decl ids in declaration order
  size_t cell_base = 0;
};

enum class Flow { Normal, Break, Return };

class Machine {
 public:
  Machine(const Ast& ast, const TestCase& test, const ExecOptions& opt)
      : idx_(ast), test_(test), opt_(opt), stdin_(stdin_text(test)) {
    trace_.test_id = test.id;
    trace_.variables = idx_.variables;
  }

  ExecutionTrace run_main() {
    guarded([&] {
      init_globals();
      auto it = idx_.functions.find("main");
      if (it == idx_.functions.end())
        throw Fault{RuntimeErrorKind::InvalidFile, {}, "program has no main function"};
      RV r = call(*it->second, it->second->span, /*capture_final=*/true);
      trace_.exit_code = static_cast<int>(wrap_i32(r.i));
    });
    return std::move(trace_);
  }

  ExecutionTrace run_fragment(int first_id, int last_id, const Harness& h) {
    guarded([&] {
      const Node* first = node(first_id);
      const Node* last = node(last_id);
      if (!first || !last) throw Fault{RuntimeErrorKind::InvalidFile, {}, "fragment not found"};
      init_globals();
      io_ = h.io;
      for (const Node* g : idx_.globals) apply_harness(*g, frame_cells_global(g->id), h);
      int fn_id = idx_.function_of[first_id];
      const Node* fn = node(fn_id);
      frames_.push_back(Frame{fn, {}, {}, cells_.size()});
      // locals named by the harness that belong to this function, in declaration order
      for (size_t d = 0; d < idx_.by_id.size(); ++d) {
        const Node* n = idx_.by_id[d];
        if (!n || n->kind != NodeKind::VarDecl || idx_.function_of[d] != fn_id) continue;
        int var = idx_.var_of_decl[d];
        if (var < 0 || !h.values.count(idx_.variables[var].key)) continue;
        int cell = declare(*n);
        apply_harness(*n, cell, h);
      }
      int par = idx_.parent[first_id];
      const Node* p = node(par);
      size_t mark = frames_.back().live.size();
      bool inside = false;
      if (p && (p->kind == NodeKind::Block || p->kind == NodeKind::Function)) {
        for (const auto& c : p->children) {
          if (c.id == first_id) inside = true;
          if (!inside) continue;
          if (exec(c) != Flow::Normal) break;
          if (c.id == last_id) break;
        }
      } else {
        exec(*first);
      }
      trace_.final_vars = snapshot();
      pop_scope(mark);
    });
    return std::move(trace_);
  }

 private:
  template <typename F>
  void guarded(F&& body) {
    try {
      body();
      trace_.outcome = Outcome::Completed;
    } catch (const Fault& f) {
      trace_.outcome = Outcome::RuntimeError;
      trace_.error = f.kind;
      trace_.error_span = f.span;
      trace_.error_message = f.message;
      trace_.final_vars = snapshot();
    } catch (const StepLimit& s) {
      trace_.outcome = Outcome::StepLimitExceeded;
      trace_.error_message = s.message;
      trace_.final_vars = snapshot();
    }
    trace_.stdout_text = std::move(out_);
  }

  const Node* node(int id) const {
    return id >= 0 && id < static_cast<int>(idx_.by_id.size()) ? idx_.by_id[id] : nullptr;
  }

  int frame_cells_global(int decl_id) const {
    auto it = global_slot_.find(decl_id);
    return it == global_slot_.end() ? -1 : it->second;
  }

  void apply_harness(const Node& decl, int cell, const Harness& h) {
    int var = idx_.var_of_decl[decl.id];
    if (var < 0 || cell < 0) return;
    auto it = h.values.find(idx_.variables[var].key);
    if (it == h.values.end()) return;
    auto& dst = cells_[cell].v;
    for (size_t i = 0; i < dst.size() && i < it->second.size(); ++i) dst[i] = it->second[i];
  }

  void init_globals() {
    for (const Node* g : idx_.globals) {
      Cell c;
      c.decl = g;
      c.v.assign(std::max(1, g->type.array_size), 0.0);  // static storage is zeroed
      cells_.push_back(std::move(c));
      int cell = static_cast<int>(cells_.size()) - 1;
      global_slot_[g->id] = cell;
      if (!g->children.empty()) cells_[cell].v[0] = convert_for_store(eval(g->children[0]), g->type.base);
    }
  }

  // ---- state ---------------------------------------------------------------
  int declare(const Node& decl) {
    Frame& fr = frames_.back();
    if (auto it = fr.slot.find(decl.id); it != fr.slot.end()) {
      std::fill(cells_[it->second].v.begin(), cells_[it->second].v.end(), kUninit);
      return it->second;
    }
    Cell c;
    c.decl = &decl;
    c.v.assign(std::max(1, decl.type.array_size), kUninit);
    cells_.push_back(std::move(c));
    int cell = static_cast<int>(cells_.size()) - 1;
    fr.slot[decl.id] = cell;
    fr.live.push_back(decl.id);
    return cell;
  }

  void pop_scope(size_t mark) {
    Frame& fr = frames_.back();
    while (fr.live.size() > mark) {
      fr.slot.erase(fr.live.back());
      fr.live.pop_back();
    }
  }

  int cell_of(const Node& ref) {
    int decl = idx_.decl_of[ref.id];
    if (!frames_.empty()) {
      auto it = frames_.back().slot.find(decl);
      if (it != frames_.back().slot.end()) return it->second;
    }
    auto g = global_slot_.find(decl);
    if (g != global_slot_.end()) return g->second;
    throw Fault{RuntimeErrorKind::UninitializedRead, ref.span,
                "variable '" + ref.text + "' is not in scope"};
  }

  std::vector<VarSnapshot> snapshot() const {
    std::vector<VarSnapshot> out;
    for (const Node* g : idx_.globals) {
      auto it = global_slot_.find(g->id);
      if (it == global_slot_.end()) continue;
      out.push_back({idx_.var_of_decl[g->id], cells_[it->second].v});
    }
    if (!frames_.empty()) {
      const Frame& fr = frames_.back();
      for (int d : fr.live) out.push_back({idx_.var_of_decl[d], cells_[fr.slot.at(d)].v});
    }
    return out;
  }

  void step(const Node& n, const SourceSpan& span) {
    ++trace_.step_count;
    if (trace_.step_count > opt_.step_limit) {
      --trace_.step_count;
      throw StepLimit{"step limit of " + std::to_string(opt_.step_limit) + " exceeded"};
    }
    if (!opt_.record_steps) return;
    if (static_cast<long>(trace_.steps.size()) >= opt_.max_recorded_steps) {
      trace_.truncated = true;
      return;
    }
    trace_.steps.push_back({n.id, span, snapshot(), io_});
  }

  // ---- lvalues -------------------------------------------------------------
  struct LRef {
    int cell;
    int elem;
    BaseType base;
  };

  LRef lvalue(const Node& n) {
    if (n.kind == NodeKind::VarRef) {
      int cell = cell_of(n);
      return {cell, 0, cells_[cell].decl->type.base};
    }
    if (n.kind == NodeKind::Index) {
      int cell = cell_of(n.children[0]);
      std::int64_t i = as_int(eval(n.children[1]));
      check_bounds(cell, i, n);
      return {cell, static_cast<int>(i), cells_[cell].decl->type.base};
    }
    throw Fault{RuntimeErrorKind::FormatMismatch, n.span, "not assignable"};
  }

  void check_bounds(int cell, std::int64_t i, const Node& at) {
    std::int64_t size = static_cast<std::int64_t>(cells_[cell].v.size());
    if (i < 0 || i >= size)
      throw Fault{RuntimeErrorKind::ArrayOutOfBounds, at.span,
                  "index " + std::to_string(i) + " outside [0, " + std::to_string(size) + ")"};
  }

  void store(const LRef& r, const RV& v) { cells_[r.cell].v[r.elem] = convert_for_store(v, r.base); }

  RV load(const LRef& r, const Node& at) {
    double x = cells_[r.cell].v[r.elem];
    if (std::isnan(x))
      throw Fault{RuntimeErrorKind::UninitializedRead, at.span,
                  "read of uninitialized '" + cells_[r.cell].decl->text + "'"};
    return load_value(x, r.base);
  }

  // ---- expressions ---------------------------------------------------------
  RV eval(const Node& e) {
    switch (e.kind) {
      case NodeKind::IntLit: {
        bool u = !e.text.empty() && (e.text.back() == 'u' || e.text.back() == 'U');
        if (u || e.int_value > 0x7fffffff) return {VK::U, wrap_u32(e.int_value), 0.0};
        return make_int(e.int_value);
      }
      case NodeKind::CharLit:
        return make_int(static_cast<std::int8_t>(e.int_value & 0xff));
      case NodeKind::FloatLit: return {VK::F, 0, e.float_value};
      case NodeKind::VarRef:
      case NodeKind::Index: return load(lvalue(e), e);
      case NodeKind::Unary: return unary(e);
      case NodeKind::Binary: return binary(e);
      case NodeKind::Call: {
        auto it = idx_.functions.find(e.text);
        if (it == idx_.functions.end())
          throw Fault{RuntimeErrorKind::InvalidFile, e.span, "undefined function " + e.text};
        return call(*it->second, e.span, false);
      }
      case NodeKind::Fscanf: return make_int(fscan(e));
      default:
        throw Fault{RuntimeErrorKind::FormatMismatch, e.span, "unexpected expression"};
    }
  }

  RV unary(const Node& e) {
    RV v = eval(e.children[0]);
    if (e.text == "!") return make_int(truthy(v) ? 0 : 1);
    if (e.text == "-") {
      if (v.k == VK::F) return {VK::F, 0, -v.f};
      if (v.k == VK::U) return {VK::U, wrap_u32(-v.i), 0.0};
      return make_int(-v.i);
    }
    // ~
    std::int64_t x = as_int(v);
    if (v.k == VK::U) return {VK::U, wrap_u32(~x), 0.0};
    return make_int(~x);
  }

  RV arith(const std::string& op, RV a, RV b, const Node& at) {
    if (op == "<<" || op == ">>") {
      // result has the promoted type of the left operand; count taken mod 32
      int count = static_cast<int>(as_int(b) & 31);
      std::uint32_t bits = static_cast<std::uint32_t>(as_int(a));
      if (a.k == VK::U) {
        std::uint32_t r = op == "<<" ? bits << count : bits >> count;
        return {VK::U, static_cast<std::int64_t>(r), 0.0};
      }
      if (op == "<<") return make_int(static_cast<std::int32_t>(bits << count));
      return make_int(static_cast<std::int32_t>(bits) >> count);
    }
    if (a.k == VK::F || b.k == VK::F) {
      double x = as_double(a), y = as_double(b);
      if (op == "+") return {VK::F, 0, x + y};
      if (op == "-") return {VK::F, 0, x - y};
      if (op == "*") return {VK::F, 0, x * y};
      if (op == "/") {
        if (y == 0.0) throw Fault{RuntimeErrorKind::DivisionByZero, at.span, "division by zero"};
        return {VK::F, 0, x / y};
      }
      if (op == "%") {
        if (y == 0.0) throw Fault{RuntimeErrorKind::DivisionByZero, at.span, "division by zero"};
        return {VK::F, 0, std::fmod(x, y)};
      }
      if (op == "<") return make_int(x < y);
      if (op == "<=") return make_int(x <= y);
      if (op == ">") return make_int(x > y);
      if (op == ">=") return make_int(x >= y);
      if (op == "==") return make_int(x == y);
      if (op == "!=") return make_int(x != y);
      a = {VK::I, as_int(a), 0.0};
      b = {VK::I, as_int(b), 0.0};
    }
    bool u = a.k == VK::U || b.k == VK::U;
    std::int64_t x = u ? wrap_u32(a.i) : a.i;
    std::int64_t y = u ? wrap_u32(b.i) : b.i;
    auto wrap = [&](std::int64_t r) -> RV {
      return u ? RV{VK::U, wrap_u32(r), 0.0} : make_int(r);
    };
    if (op == "+") return wrap(x + y);
    if (op == "-") return wrap(x - y);
    if (op == "*") return wrap(x * y);
    if (op == "/" || op == "%") {
      if (y == 0) throw Fault{RuntimeErrorKind::DivisionByZero, at.span, "division by zero"};
      return wrap(op == "/" ? x / y : x % y);
    }
    if (op == "&") return wrap(x & y);
    if (op == "|") return wrap(x | y);
    if (op == "^") return wrap(x ^ y);
    if (op == "<") return make_int(x < y);
    if (op == "<=") return make_int(x <= y);
    if (op == ">") return make_int(x > y);
    if (op == ">=") return make_int(x >= y);
    if (op == "==") return make_int(x == y);
    if (op == "!=") return make_int(x != y);
    throw Fault{RuntimeErrorKind::FormatMismatch, at.span, "unknown operator " + op};
  }

  RV binary(const Node& e) {
    if (e.text == "&&") {
      if (!truthy(eval(e.children[0]))) return make_int(0);
      return make_int(truthy(eval(e.children[1])) ? 1 : 0);
    }
    if (e.text == "||") {
      if (truthy(eval(e.children[0]))) return make_int(1);
      return make_int(truthy(eval(e.children[1])) ? 1 : 0);
    }
    RV a = eval(e.children[0]);
    RV b = eval(e.children[1]);
    return arith(e.text, a, b, e);
  }

  RV call(const Node& fn, const SourceSpan& at, bool capture_final) {
    if (frames_.size() >= kMaxCallDepth) throw StepLimit{"call depth exceeded at " + at.str()};
    frames_.push_back(Frame{&fn, {}, {}, cells_.size()});
    ret_ = make_int(0);
    Flow f = exec(fn.children[0]);
    (void)f;
    RV r = ret_;
    if (capture_final) trace_.final_vars = snapshot();
    cells_.resize(frames_.back().cell_base);
    frames_.pop_back();
    ret_ = make_int(0);
    return r;
  }

  // ---- input ---------------------------------------------------------------
  struct ScanResult {
    int assigned = 0;
    int conversions = 0;
    bool input_failure = false;
  };

  ScanResult scan(const std::string& text, size_t& pos, const std::string& fmt,
                  const std::vector<const Node*>& targets) {
    ScanResult res;
    size_t ti = 0;
    for (size_t i = 0; i < fmt.size(); ++i) {
      char fc = fmt[i];
      if (is_space(fc)) {
        while (pos < text.size() && is_space(text[pos])) ++pos;
        continue;
      }
      if (fc != '%') {
        if (pos >= text.size()) {
          res.input_failure = true;
          break;
        }
        if (text[pos] != fc) break;
        ++pos;
        continue;
      }
      char conv = fmt[++i];
      if (ti >= targets.size()) break;
      const Node& target = *targets[ti++];
      check_target(conv, target);
      if (conv != 'c')
        while (pos < text.size() && is_space(text[pos])) ++pos;
      if (pos >= text.size()) {
        res.input_failure = true;
        break;
      }
      if (!convert_one(conv, text, pos, target)) break;
      ++res.assigned;
    }
    res.conversions = static_cast<int>(targets.size());
    return res;
  }

  void check_target(char conv, const Node& target) {
    const Node& lv = target.kind == NodeKind::AddrOf ? target.children[0] : target;
    BaseType base = cells_[cell_of(lv.kind == NodeKind::Index ? lv.children[0] : lv)].decl->type.base;
    bool narrow = base == BaseType::Char || base == BaseType::UChar;
    bool mismatch = false;
    if (conv == 'd' || conv == 'u' || conv == 'x') mismatch = narrow || base == BaseType::Float;
    if (conv == 'c') mismatch = !narrow;
    if (conv == 'f') mismatch = base != BaseType::Float;
    if (mismatch)
      throw Fault{RuntimeErrorKind::FormatMismatch, target.span,
                  std::string("%") + conv + " does not match the type of '" + lv.text + "'"};
  }

  bool convert_one(char conv, const std::string& text, size_t& pos, const Node& target) {
    if (conv == 's') {
      int cell = cell_of(target);
      size_t start = pos;
      while (pos < text.size() && !is_space(text[pos])) ++pos;
      size_t len = pos - start;
      auto& v = cells_[cell].v;
      if (len + 1 > v.size())
        throw Fault{RuntimeErrorKind::ArrayOutOfBounds, target.span,
                    "word of length " + std::to_string(len) + " does not fit in '" +
                        cells_[cell].decl->text + "'"};
      for (size_t k = 0; k < len; ++k)
        v[k] = static_cast<double>(static_cast<std::int8_t>(text[start + k]));
      v[len] = 0.0;
      return true;
    }
    LRef r = lvalue(target.children[0]);
    if (conv == 'c') {
      store(r, make_int(static_cast<std::int8_t>(text[pos++])));
      return true;
    }
    if (conv == 'f') {
      size_t end = pos;
      if (end < text.size() && (text[end] == '+' || text[end] == '-')) ++end;
      bool digits = false;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end, digits = true;
      if (end < text.size() && text[end] == '.') {
        ++end;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end, digits = true;
      }
      if (!digits) return false;
      if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
        size_t e = end + 1;
        if (e < text.size() && (text[e] == '+' || text[e] == '-')) ++e;
        if (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) {
          while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) ++e;
          end = e;
        }
      }
      double d = std::strtod(text.substr(pos, end - pos).c_str(), nullptr);
      pos = end;
      store(r, {VK::F, 0, d});
      return true;
    }
    // %d %u %x
    size_t p = pos;
    bool neg = false;
    if (p < text.size() && (text[p] == '+' || text[p] == '-')) neg = text[p++] == '-';
    int radix = conv == 'x' ? 16 : 10;
    if (radix == 16 && p + 1 < text.size() && text[p] == '0' && (text[p + 1] == 'x' || text[p + 1] == 'X') &&
        p + 2 < text.size() && hex_digit(text[p + 2]) >= 0)
      p += 2;
    std::uint64_t acc = 0;
    bool any = false;
    while (p < text.size()) {
      int d = hex_digit(text[p]);
      if (d < 0 || d >= radix) break;
      acc = acc * radix + static_cast<std::uint64_t>(d);
      if (acc > 0xffffffffffull) acc = 0xffffffffffull;  // saturate; stored value wraps anyway
      any = true;
      ++p;
    }
    if (!any) return false;
    pos = p;
    std::int64_t x = static_cast<std::int64_t>(acc);
    store(r, make_int_any(neg ? -x : x));
    return true;
  }

  static RV make_int_any(std::int64_t x) { return {VK::I, x, 0.0}; }

  std::vector<const Node*> targets_of(const Node& n, size_t first) {
    std::vector<const Node*> t;
    for (size_t i = first; i < n.children.size(); ++i) t.push_back(&n.children[i]);
    return t;
  }

  void do_scanf(const Node& n) {
    ScanResult r = scan(stdin_, io_.stdin_pos, n.text, targets_of(n, 0));
    if (r.assigned < r.conversions) {
      if (r.input_failure)
        throw Fault{RuntimeErrorKind::ReadPastInput, n.span, "scanf read past the end of input"};
      throw Fault{RuntimeErrorKind::FormatMismatch, n.span, "input does not match \"" + n.text + "\""};
    }
  }

  FileCursor& file_of(const Node& handle_ref, const SourceSpan& at) {
    RV h = load(lvalue(handle_ref), handle_ref);
    std::int64_t k = h.i;
    if (k <= 0 || k > static_cast<std::int64_t>(io_.files.size()) || !io_.files[k - 1].open)
      throw Fault{RuntimeErrorKind::InvalidFile, at, "invalid file handle '" + handle_ref.text + "'"};
    return io_.files[k - 1];
  }

  std::int64_t fscan(const Node& n) {
    FileCursor& fc = file_of(n.children[0], n.span);
    if (fc.mode != "r") throw Fault{RuntimeErrorKind::InvalidFile, n.span, "file not open for reading"};
    const std::string& text = test_.input_files.at(fc.name);
    ScanResult r = scan(text, fc.pos, n.text, targets_of(n, 1));
    if (r.input_failure && r.assigned == 0) return -1;
    return r.assigned;
  }

  // ---- output --------------------------------------------------------------
  void do_printf(const Node& n) {
    const std::string& fmt = n.text;
    size_t arg = 0;
    for (size_t i = 0; i < fmt.size(); ++i) {
      if (fmt[i] != '%' || i + 1 >= fmt.size()) {
        out_ += fmt[i];
        continue;
      }
      char conv = fmt[++i];
      if (conv == '%') {
        out_ += '%';
        continue;
      }
      const Node& a = n.children.at(arg++);
      char buf[64];
      if (conv == 's') {
        int cell = cell_of(a);
        const auto& v = cells_[cell].v;
        size_t k = 0;
        for (; k < v.size(); ++k) {
          if (std::isnan(v[k]))
            throw Fault{RuntimeErrorKind::UninitializedRead, a.span, "printing uninitialized string"};
          if (v[k] == 0.0) break;
          out_ += static_cast<char>(static_cast<std::int64_t>(v[k]));
        }
        if (k == v.size())
          throw Fault{RuntimeErrorKind::ArrayOutOfBounds, a.span, "string is not terminated"};
        continue;
      }
      RV v = eval(a);
      switch (conv) {
        case 'd': std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(wrap_i32(as_int(v)))); break;
        case 'u': std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(wrap_u32(as_int(v)))); break;
        case 'x': std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(wrap_u32(as_int(v)))); break;
        case 'c': buf[0] = static_cast<char>(as_int(v) & 0xff); buf[1] = 0; break;
        default: std::snprintf(buf, sizeof buf, "%f", as_double(v)); break;
      }
      if (conv == 'c') out_ += buf[0];
      else out_ += buf;
    }
    if (out_.size() > (1u << 20)) throw StepLimit{"output limit exceeded"};
  }

  // ---- statements ----------------------------------------------------------
  Flow exec_block(const Node& b) {
    size_t mark = frames_.back().live.size();
    Flow f = Flow::Normal;
    for (const auto& c : b.children) {
      f = exec(c);
      if (f != Flow::Normal) break;
    }
    pop_scope(mark);
    return f;
  }

  Flow exec(const Node& s) {
    switch (s.kind) {
      case NodeKind::Block: return exec_block(s);
      case NodeKind::VarDecl: {
        int cell = declare(s);
        if (!s.children.empty())
          cells_[cell].v[0] = convert_for_store(eval(s.children[0]), s.type.base);
        step(s, s.span);
        return Flow::Normal;
      }
      case NodeKind::Assign: {
        RV rhs = eval(s.children[1]);
        LRef r = lvalue(s.children[0]);
        if (s.text != "=") rhs = arith(s.text.substr(0, s.text.size() - 1), load(r, s.children[0]), rhs, s);
        store(r, rhs);
        step(s, s.span);
        return Flow::Normal;
      }
      case NodeKind::IncDec: {
        LRef r = lvalue(s.children[0]);
        RV v = load(r, s.children[0]);
        store(r, arith(s.text == "++" ? "+" : "-", v, make_int(1), s));
        step(s, s.span);
        return Flow::Normal;
      }
      case NodeKind::If: {
        bool c = truthy(eval(s.children[0]));
        step(s, s.children[0].span);
        if (c) return exec(s.children[1]);
        if (s.children.size() > 2) return exec(s.children[2]);
        return Flow::Normal;
      }
      case NodeKind::While:
        while (true) {
          bool c = truthy(eval(s.children[0]));
          step(s, s.children[0].span);
          if (!c) return Flow::Normal;
          Flow f = exec(s.children[1]);
          if (f == Flow::Break) return Flow::Normal;
          if (f == Flow::Return) return f;
        }
      case NodeKind::For: {
        if (s.children[0].kind != NodeKind::Empty) exec(s.children[0]);
        while (true) {
          if (s.children[1].kind != NodeKind::Empty) {
            bool c = truthy(eval(s.children[1]));
            step(s, s.children[1].span);
            if (!c) return Flow::Normal;
          }
          Flow f = exec(s.children[3]);
          if (f == Flow::Break) return Flow::Normal;
          if (f == Flow::Return) return f;
          if (s.children[2].kind != NodeKind::Empty) exec(s.children[2]);
        }
      }
      case NodeKind::Scanf:
        do_scanf(s);
        step(s, s.span);
        return Flow::Normal;
      case NodeKind::Printf:
        do_printf(s);
        step(s, s.span);
        return Flow::Normal;
      case NodeKind::Fopen: {
        LRef r = lvalue(s.children[0]);
        std::int64_t handle = 0;
        if (s.aux != "r" || test_.input_files.count(s.text)) {
          io_.files.push_back({s.text, s.aux, 0, true});
          handle = static_cast<std::int64_t>(io_.files.size());
        }
        store(r, make_int(handle));
        step(s, s.span);
        return Flow::Normal;
      }
      case NodeKind::Fclose:
        file_of(s.children[0], s.span).open = false;
        step(s, s.span);
        return Flow::Normal;
      case NodeKind::Return:
        ret_ = s.children.empty() ? make_int(0) : eval(s.children[0]);
        step(s, s.span);
        return Flow::Return;
      case NodeKind::Break:
        step(s, s.span);
        return Flow::Break;
      case NodeKind::ExprStmt:
        eval(s.children[0]);
        step(s, s.span);
        return Flow::Normal;
      case NodeKind::Empty:
        step(s, s.span);
        return Flow::Normal;
      default:
        throw Fault{RuntimeErrorKind::FormatMismatch, s.span, "not a statement"};
    }
  }

  ProgramIndex idx_;
  const TestCase& test_;
  ExecOptions opt_;
  std::string stdin_;
  IoState io_;
  std::string out_;
  std::vector<Cell> cells_;
  std::map<int, int> global_slot_;
  std::vector<Frame> frames_;
  RV ret_;
  ExecutionTrace trace_;
};

}  // namespace

ExecutionTrace execute(const Ast& ast, const TestCase& test, const ExecOptions& opt) {
  return Machine(ast, test, opt).run_main();
}

ExecutionTrace execute_fragment(const Ast& ast, int first_id, int last_id, const Harness& harness,
                                const TestCase& test, const ExecOptions& opt) {
  return Machine(ast, test, opt).run_fragment(first_id, last_id, harness);
}

}  // namespace cdiag
