#include "cdiag/testgen.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace cdiag {

namespace {

bool is_relational(const std::string& op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

bool contains_var(const Node& n, const std::string& name) {
  if (n.kind == NodeKind::VarRef && n.text == name) return true;
  for (const auto& c : n.children)
    if (contains_var(c, name)) return true;
  return false;
}

struct ReadSlot {
  char conv;
  std::string var;  // target variable name
};

struct Shape {
  std::vector<ReadSlot> stdin_reads;
  std::vector<std::string> input_files;
  std::set<int> int_consts;
  std::vector<char> pattern_chars;  // compared against array elements
  std::vector<char> separators;     // whitespace compared against scalars
  std::string position_var, length_var;
  int width = 8;
};

void push_unique(std::vector<char>& v, char c) {
  if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
}

Shape analyze(const Ast& ast) {
  Shape s;
  std::vector<std::string> shift_vars;
  visit(ast.root, [&](const Node& n) {
    if (n.kind == NodeKind::Scanf) {
      size_t k = 0;
      for (size_t i = 0; i + 1 < n.text.size(); ++i) {
        if (n.text[i] != '%') continue;
        char conv = n.text[++i];
        if (k >= n.children.size()) break;
        const Node& t = n.children[k++];
        const Node& lv = t.kind == NodeKind::AddrOf ? t.children[0] : t;
        const Node& base = lv.kind == NodeKind::Index ? lv.children[0] : lv;
        s.stdin_reads.push_back({conv, base.text});
      }
    }
    if (n.kind == NodeKind::Fopen && n.aux == "r") s.input_files.push_back(n.text);
    if (n.kind == NodeKind::Binary && is_relational(n.text)) {
      for (int side = 0; side < 2; ++side) {
        const Node& lit = n.children[side];
        const Node& other = n.children[1 - side];
        if (other.kind == NodeKind::Fscanf) continue;
        if (lit.kind == NodeKind::IntLit && lit.text != "NULL" && lit.text != "EOF") {
          s.int_consts.insert(static_cast<int>(lit.int_value));
        } else if (lit.kind == NodeKind::CharLit) {
          char c = static_cast<char>(lit.int_value);
          bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
          if (other.kind == NodeKind::Index || !ws)
            push_unique(s.pattern_chars, c);
          else
            push_unique(s.separators, c);
        }
      }
    }
    if (n.kind == NodeKind::Binary && (n.text == "<<" || n.text == ">>")) {
      visit(n.children[1], [&](const Node& x) {
        if (x.kind == NodeKind::VarRef) shift_vars.push_back(x.text);
      });
    }
  });
  // a shift count appearing as `W - v` names a field length; a bare one a position
  for (const auto& v : shift_vars) {
    bool in_sub = false;
    visit(ast.root, [&](const Node& n) {
      if (n.kind == NodeKind::Binary && n.text == "-" && n.children[0].kind == NodeKind::IntLit &&
          contains_var(n.children[1], v)) {
        in_sub = true;
        s.width = static_cast<int>(n.children[0].int_value);
      }
    });
    bool read = std::any_of(s.stdin_reads.begin(), s.stdin_reads.end(),
                            [&](const ReadSlot& r) { return r.var == v; });
    if (!read) continue;
    if (in_sub && s.length_var.empty()) s.length_var = v;
    if (!in_sub && s.position_var.empty()) s.position_var = v;
  }
  if (s.width < 1 || s.width > 32) s.width = 8;
  if (s.separators.empty()) s.separators.push_back(' ');
  return s;
}

class Gen {
 public:
  Gen(const Shape& s, std::uint64_t seed) : s_(s), rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

  char filler() const {
    for (char c : std::string("xyzqb"))
      if (std::find(s_.pattern_chars.begin(), s_.pattern_chars.end(), c) == s_.pattern_chars.end())
        return c;
    return 'x';
  }

  std::string random_word(int len) {
    std::vector<char> alpha = s_.pattern_chars;
    alpha.push_back(filler());
    std::string w;
    for (int i = 0; i < len; ++i) w += alpha[below(alpha.size())];
    return w;
  }

  static std::string cycle(const std::string& chain, size_t phase, int len) {
    std::string w;
    for (int i = 0; i < len; ++i) w += chain[(phase + static_cast<size_t>(i)) % chain.size()];
    return w;
  }

  std::string join(const std::vector<std::string>& words, bool newline = true) {
    std::string out;
    for (size_t i = 0; i < words.size(); ++i) {
      if (i) out += s_.separators[below(s_.separators.size())];
      out += words[i];
    }
    return newline ? out + "\n" : out;
  }

  std::vector<std::string> boundary_words() {
    std::vector<std::string> words;
    char f = filler();
    for (char c : s_.pattern_chars) {
      words.push_back(std::string(1, c) + f + f);
      words.push_back(std::string(1, f) + c + f);
      words.push_back(std::string(1, f) + f + c);
    }
    // the characters chained in comparison order, overlapping with themselves
    if (s_.pattern_chars.size() >= 2) {
      std::string chain(s_.pattern_chars.begin(), s_.pattern_chars.end());
      std::string pat = chain + chain.front();
      words.push_back(pat);
      words.push_back(pat + chain.substr(1) + chain.front());
      words.push_back(std::string(1, chain.front()) + pat);
      words.push_back(chain);
    }
    // words around each length constant; patterned in both phases so that
    // dropping or keeping the last character changes the count
    std::string chain(s_.pattern_chars.begin(), s_.pattern_chars.end());
    for (int c : s_.int_consts) {
      for (int len : {c - 1, c, c + 1, c + 2}) {
        if (len < 1 || len > 40) continue;
        if (chain.size() >= 2) {
          words.push_back(cycle(chain, 0, len));
          words.push_back(cycle(chain, 1, len));
        } else {
          words.push_back(random_word(len));
        }
      }
    }
    return words;
  }

  std::string int_token() {
    std::vector<int> pool(s_.int_consts.begin(), s_.int_consts.end());
    if (pool.empty() || below(3) == 0) return std::to_string(static_cast<int>(below(201)) - 100);
    int c = pool[below(pool.size())];
    return std::to_string(c + static_cast<int>(below(3)) - 1);
  }

  std::string hex_token(unsigned v) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    do {
      s.insert(s.begin(), digits[v & 15]);
      v >>= 4;
    } while (v);
    return s;
  }

  std::vector<std::string> stdin_tokens(unsigned a, unsigned b, int pos, int len) {
    std::vector<std::string> toks;
    int hex_seen = 0;
    for (const auto& r : s_.stdin_reads) {
      if (r.var == s_.position_var) {
        toks.push_back(std::to_string(pos));
      } else if (r.var == s_.length_var) {
        toks.push_back(std::to_string(len));
      } else if (r.conv == 'x') {
        toks.push_back(hex_token(hex_seen++ == 0 ? a : b));
      } else if (r.conv == 'c') {
        toks.push_back(std::string(1, s_.pattern_chars.empty() ? 'a' : s_.pattern_chars[0]));
      } else if (r.conv == 's') {
        toks.push_back(random_word(1 + static_cast<int>(below(8))));
      } else if (r.conv == 'f') {
        toks.push_back(std::to_string(below(100)) + ".5");
      } else if (r.conv == 'u') {
        toks.push_back(std::to_string(below(1000)));
      } else {
        toks.push_back(int_token());
      }
    }
    return toks;
  }

  TestCase make(std::vector<std::string> toks, std::vector<std::string> words) {
    TestCase t;
    t.id = "gen-" + std::to_string(next_id_++);
    t.stdin_tokens = std::move(toks);
    for (const auto& f : s_.input_files) t.input_files[f] = join(words);
    return t;
  }

  std::vector<TestCase> boundary() {
    std::vector<TestCase> out;
    unsigned mask = s_.width >= 32 ? 0xffffffffu : ((1u << s_.width) - 1);
    if (!s_.position_var.empty() && !s_.length_var.empty()) {
      const unsigned pairs[][2] = {{0xff, 0x00}, {0x00, 0xff}, {0xa5, 0x5a}};
      int k = 0;
      for (int len : {1, 2, 3, s_.width / 2, s_.width - 1, s_.width}) {
        if (len < 1 || len > s_.width) continue;
        for (int pos : {0, (s_.width - len) / 2, s_.width - len}) {
          const unsigned* ab = pairs[k++ % 3];
          out.push_back(make(stdin_tokens(ab[0] & mask, ab[1] & mask, pos, len), {}));
        }
      }
    } else if (!s_.stdin_reads.empty()) {
      for (int c : s_.int_consts)
        for (int d : {-1, 0, 1}) {
          auto toks = stdin_tokens(0, 0, 0, 0);
          for (size_t i = 0; i < toks.size(); ++i)
            if (s_.stdin_reads[i].conv == 'd') toks[i] = std::to_string(c + d);
          out.push_back(make(toks, {}));
        }
    }
    if (!s_.input_files.empty()) {
      auto words = boundary_words();
      for (const auto& w : words) out.push_back(make(stdin_tokens(0, 0, 0, 0), {w}));
      // every separator between two pattern-bearing words, and an empty word
      for (char sep : s_.separators) {
        std::string w = words.empty() ? "x" : words.front();
        TestCase t = make(stdin_tokens(0, 0, 0, 0), {});
        for (const auto& f : s_.input_files) t.input_files[f] = w + sep + w + "\n";
        out.push_back(std::move(t));
      }
      if (s_.pattern_chars.size() >= 2) {
        std::string chain(s_.pattern_chars.begin(), s_.pattern_chars.end());
        std::string pat = chain + chain.front();
        char sep = s_.separators.front();
        // a shorter word after a longer one leaves stale characters behind it
        TestCase stale = make(stdin_tokens(0, 0, 0, 0), {});
        for (const auto& f : s_.input_files) stale.input_files[f] = pat + sep + chain + "\n";
        out.push_back(std::move(stale));
        // the last word is not followed by any separator
        TestCase open_end = make(stdin_tokens(0, 0, 0, 0), {});
        for (const auto& f : s_.input_files) open_end.input_files[f] = chain + sep + pat;
        out.push_back(std::move(open_end));
      }
      TestCase empty = make(stdin_tokens(0, 0, 0, 0), {});
      for (const auto& f : s_.input_files) empty.input_files[f] = "";
      out.push_back(std::move(empty));
    }
    return out;
  }

  TestCase random_case() {
    unsigned mask = s_.width >= 32 ? 0xffffffffu : ((1u << s_.width) - 1);
    int len = 1 + static_cast<int>(below(static_cast<std::uint64_t>(s_.width)));
    int pos = static_cast<int>(below(static_cast<std::uint64_t>(s_.width - len + 1)));
    auto toks = stdin_tokens(static_cast<unsigned>(below(mask + 1ull)),
                             static_cast<unsigned>(below(mask + 1ull)), pos, len);
    std::vector<std::string> words;
    int n = 1 + static_cast<int>(below(6));
    for (int i = 0; i < n; ++i) words.push_back(random_word(1 + static_cast<int>(below(10))));
    TestCase t = make(std::move(toks), std::move(words));
    if (below(4) == 0)
      for (auto& [name, text] : t.input_files)
        if (!text.empty()) text.pop_back();  // no trailing newline
    return t;
  }

 private:
  const Shape& s_;
  std::mt19937_64 rng_;
  int next_id_ = 0;
};

}  // namespace

std::vector<TestCase> generate_tests(const Ast& ast, int budget, std::uint64_t seed) {
  if (budget < 1) return {};
  Shape shape = analyze(ast);
  Gen gen(shape, seed);
  std::vector<TestCase> out = gen.boundary();
  if (static_cast<int>(out.size()) > budget) out.resize(budget);
  while (static_cast<int>(out.size()) < budget) out.push_back(gen.random_case());
  return out;
}

}  // namespace cdiag
