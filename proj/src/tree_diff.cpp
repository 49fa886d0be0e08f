// Zhang-Shasha tree edit distance over statement trees, plus move detection.
#include <algorithm>
#include <map>

#include "cdiag/matcher.hpp"

namespace cdiag {

const char* edit_kind_name(EditKind k) {
  switch (k) {
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
    case EditKind::Update: return "update";
    case EditKind::Move: return "move";
  }
  return "?";
}

namespace {

struct StNode {
  std::string label;
  int ast_id = -1;
  SourceSpan span;
  ConceptId concept_id = ConceptId::LoopControl;
  int parent = -1;
  std::vector<int> kids;
  std::string hash;  // serialized subtree
  int size = 1;
};

class StTree {
 public:
  explicit StTree(const Ast& ast) {
    add(ast.root, -1);
    finish(0);
    post_.push_back(-1);  // 1-based postorder
    number(0);
    l_.assign(post_.size(), 0);
    for (size_t i = 1; i < post_.size(); ++i) {
      const StNode& n = nodes[post_[i]];
      l_[i] = n.kids.empty() ? static_cast<int>(i) : l_[pos_[n.kids.front()]];
    }
    std::map<int, int> highest;
    for (size_t i = 1; i < post_.size(); ++i) highest[l_[i]] = static_cast<int>(i);
    for (auto& [leaf, i] : highest) keyroots.push_back(i);
    std::sort(keyroots.begin(), keyroots.end());
  }

  std::vector<StNode> nodes;
  std::vector<int> keyroots;

  int count() const { return static_cast<int>(post_.size()) - 1; }
  int l(int i) const { return l_[i]; }
  const StNode& at(int i) const { return nodes[post_[i]]; }
  int index_of(int i) const { return post_[i]; }
  int pos_of(int node) const { return pos_[node]; }

  bool in_subtree(int node, int root) const {
    for (int n = node; n >= 0; n = nodes[n].parent)
      if (n == root) return true;
    return false;
  }

 private:
  int make(std::string label, const Node& src, int parent, ConceptId c) {
    StNode n;
    n.label = std::move(label);
    n.ast_id = src.id;
    n.span = src.span;
    n.concept_id = c;
    n.parent = parent;
    nodes.push_back(std::move(n));
    int idx = static_cast<int>(nodes.size()) - 1;
    if (parent >= 0) nodes[parent].kids.push_back(idx);
    return idx;
  }

  void add_body(const Node& body, int parent) {
    if (body.kind == NodeKind::Block) {
      for (const auto& c : body.children) add(c, parent);
    } else {
      add(body, parent);
    }
  }

  void add(const Node& n, int parent) {
    switch (n.kind) {
      case NodeKind::Program: {
        int me = make("program", n, parent, ConceptId::LoopControl);
        for (const auto& c : n.children) add(c, me);
        return;
      }
      case NodeKind::Function: {
        int me = make(render_statement_head(n), n, parent, ConceptId::LoopControl);
        add_body(n.children[0], me);
        return;
      }
      case NodeKind::Block: {
        int me = make("{}", n, parent, ConceptId::LoopControl);
        for (const auto& c : n.children) add(c, me);
        return;
      }
      case NodeKind::If: {
        ConceptId c = concept_of(n);
        int me = make(render_statement_head(n), n, parent, c);
        add_body(n.children[1], me);
        if (n.children.size() > 2) {
          int e = make("else", n.children[2], me, c);
          add_body(n.children[2], e);
        }
        return;
      }
      case NodeKind::While:
      case NodeKind::For: {
        int me = make(render_statement_head(n), n, parent, concept_of(n));
        add_body(n.children.back(), me);
        return;
      }
      default:
        make(render_statement_head(n), n, parent, concept_of(n));
    }
  }

  void finish(int i) {
    StNode& n = nodes[i];
    std::string h = n.label;
    int size = 1;
    if (!n.kids.empty()) {
      h += " {";
      for (int k : n.kids) {
        finish(k);
        h += nodes[k].hash + "; ";
        size += nodes[k].size;
      }
      h += "}";
    }
    nodes[i].hash = std::move(h);
    nodes[i].size = size;
  }

  void number(int i) {
    for (int k : nodes[i].kids) number(k);
    if (pos_.size() < nodes.size()) pos_.resize(nodes.size(), 0);
    post_.push_back(i);
    pos_[i] = static_cast<int>(post_.size()) - 1;
  }

  std::vector<int> post_;
  std::vector<int> pos_;
  std::vector<int> l_;
};

struct ZsResult {
  int distance = 0;
  std::vector<std::pair<int, int>> mapped;  // (a node, b node), st-node indices
  std::vector<int> deleted;                 // a nodes
  std::vector<int> inserted;                // b nodes
};

class ZhangShasha {
 public:
  ZhangShasha(const StTree& a, const StTree& b)
      : a_(a), b_(b), td_(a.count() + 1, std::vector<int>(b.count() + 1, 0)) {}

  ZsResult run() {
    for (int i : a_.keyroots)
      for (int j : b_.keyroots) forest(i, j);
    ZsResult r;
    r.distance = td_[a_.count()][b_.count()];
    std::vector<std::pair<int, int>> stack = {{a_.count(), b_.count()}};
    while (!stack.empty()) {
      auto [i0, j0] = stack.back();
      stack.pop_back();
      backtrack(i0, j0, r, stack);
    }
    return r;
  }

 private:
  int ren(int i, int j) const { return a_.at(i).label == b_.at(j).label ? 0 : 1; }

  // Fills fd_ for the forest pair rooted at (i0, j0) and records tree distances.
  void forest(int i0, int j0) {
    int oi = a_.l(i0) - 1, oj = b_.l(j0) - 1;
    int ni = i0 - oi, nj = j0 - oj;
    fd_.assign(ni + 1, std::vector<int>(nj + 1, 0));
    for (int x = 1; x <= ni; ++x) fd_[x][0] = fd_[x - 1][0] + 1;
    for (int y = 1; y <= nj; ++y) fd_[0][y] = fd_[0][y - 1] + 1;
    for (int x = 1; x <= ni; ++x) {
      int i = x + oi;
      for (int y = 1; y <= nj; ++y) {
        int j = y + oj;
        int del = fd_[x - 1][y] + 1;
        int ins = fd_[x][y - 1] + 1;
        if (a_.l(i) == a_.l(i0) && b_.l(j) == b_.l(j0)) {
          fd_[x][y] = std::min({del, ins, fd_[x - 1][y - 1] + ren(i, j)});
          td_[i][j] = fd_[x][y];
        } else {
          int li = a_.l(i) - 1 - oi, lj = b_.l(j) - 1 - oj;
          fd_[x][y] = std::min({del, ins, fd_[li][lj] + td_[i][j]});
        }
      }
    }
  }

  void backtrack(int i0, int j0, ZsResult& r, std::vector<std::pair<int, int>>& stack) {
    forest(i0, j0);
    int oi = a_.l(i0) - 1, oj = b_.l(j0) - 1;
    int x = i0 - oi, y = j0 - oj;
    while (x > 0 || y > 0) {
      int i = x + oi, j = y + oj;
      if (x > 0 && y > 0) {
        bool both_roots = a_.l(i) == a_.l(i0) && b_.l(j) == b_.l(j0);
        if (both_roots && fd_[x][y] == fd_[x - 1][y - 1] + ren(i, j)) {
          r.mapped.push_back({a_.index_of(i), b_.index_of(j)});
          --x;
          --y;
          continue;
        }
        if (!both_roots) {
          int li = a_.l(i) - 1 - oi, lj = b_.l(j) - 1 - oj;
          if (fd_[x][y] == fd_[li][lj] + td_[i][j]) {
            stack.push_back({i, j});
            x = li;
            y = lj;
            continue;
          }
        }
      }
      if (x > 0 && fd_[x][y] == fd_[x - 1][y] + 1) {
        r.deleted.push_back(a_.index_of(i));
        --x;
        continue;
      }
      r.inserted.push_back(b_.index_of(j));
      --y;
    }
  }

  const StTree& a_;
  const StTree& b_;
  std::vector<std::vector<int>> td_;
  std::vector<std::vector<int>> fd_;
};

std::vector<int> lcs_keep(const std::vector<std::string>& a, const std::vector<std::string>& b,
                          std::vector<int>& keep_b) {
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> t(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      t[i][j] = a[i] == b[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
  std::vector<int> keep_a(n, 0);
  keep_b.assign(m, 0);
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      keep_a[i] = keep_b[j] = 1;
      ++i;
      ++j;
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return keep_a;
}

}  // namespace

int tree_edit_distance(const Ast& a, const Ast& b) {
  StTree ta(a), tb(b);
  return ZhangShasha(ta, tb).run().distance;
}

std::vector<Edit> diff_programs(const Ast& student, const Ast& reference,
                                const VariableMapping& mapping) {
  Ast renamed = rename_through(student, mapping);
  StTree A(reference), B(renamed);
  ZsResult zs = ZhangShasha(A, B).run();

  const int na = static_cast<int>(A.nodes.size()), nb = static_cast<int>(B.nodes.size());
  std::vector<int> a_to_b(na, -1), b_to_a(nb, -1);
  for (auto [x, y] : zs.mapped) {
    a_to_b[x] = y;
    b_to_a[y] = x;
  }
  std::vector<char> a_del(na, 0), b_ins(nb, 0), a_done(na, 0), b_done(nb, 0);
  for (int x : zs.deleted) a_del[x] = 1;
  for (int y : zs.inserted) b_ins[y] = 1;

  auto edit_for = [&](EditKind k, int x, int y) {
    Edit e;
    e.kind = k;
    if (x >= 0) {
      const StNode& n = A.nodes[x];
      e.reference_id = n.ast_id;
      e.reference_span = n.span;
      e.reference_label = n.label;
      e.size = n.size;
      e.concept_id = n.concept_id;
    }
    if (y >= 0) {
      const StNode& n = B.nodes[y];
      e.student_id = n.ast_id;
      e.student_span = n.span;  // renaming keeps ids and spans
      e.student_label = n.label;
      if (x < 0) {
        e.size = n.size;
        e.concept_id = n.concept_id;
      }
    }
    return e;
  };
  auto consume_a = [&](int root) {
    for (int x = 0; x < na; ++x)
      if (A.in_subtree(x, root)) a_done[x] = 1;
  };
  auto consume_b = [&](int root) {
    for (int y = 0; y < nb; ++y)
      if (B.in_subtree(y, root)) b_done[y] = 1;
  };

  std::vector<Edit> out;

  // Children of a mapped pair that are a permutation of each other: the
  // elements outside the longest common subsequence moved.
  for (int x = 0; x < na; ++x) {
    int y = a_to_b[x];
    if (y < 0 || a_done[x]) continue;
    const auto& ka = A.nodes[x].kids;
    const auto& kb = B.nodes[y].kids;
    if (ka.size() < 2 || ka.size() != kb.size()) continue;
    std::vector<std::string> ha, hb;
    for (int k : ka) ha.push_back(A.nodes[k].hash);
    for (int k : kb) hb.push_back(B.nodes[k].hash);
    if (ha == hb) continue;
    std::vector<std::string> sa = ha, sb = hb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) continue;
    std::vector<int> keep_b;
    std::vector<int> keep_a = lcs_keep(ha, hb, keep_b);
    std::vector<char> used(kb.size(), 0);
    for (size_t i = 0; i < ka.size(); ++i) {
      if (keep_a[i]) continue;
      for (size_t j = 0; j < kb.size(); ++j) {
        if (keep_b[j] || used[j] || hb[j] != ha[i]) continue;
        used[j] = 1;
        Edit e = edit_for(EditKind::Move, ka[i], kb[j]);
        e.reorder = true;
        out.push_back(std::move(e));
        break;
      }
    }
    for (int k : ka) consume_a(k);
    for (int k : kb) consume_b(k);
  }

  // A fully deleted subtree reappearing as a fully inserted one is a move.
  auto fully = [](const StTree& t, const std::vector<char>& flag, int root) {
    for (int n = 0; n < static_cast<int>(t.nodes.size()); ++n)
      if (t.in_subtree(n, root) && !flag[n]) return false;
    return true;
  };
  for (int x = 0; x < na; ++x) {  // st-node order is preorder: larger first
    if (a_done[x] || !a_del[x] || !fully(A, a_del, x)) continue;
    for (int y = 0; y < nb; ++y) {
      if (b_done[y] || !b_ins[y] || B.nodes[y].hash != A.nodes[x].hash) continue;
      if (!fully(B, b_ins, y)) continue;
      Edit e = edit_for(EditKind::Move, x, y);
      int pa = A.nodes[x].parent, pb = B.nodes[y].parent;
      e.reorder = pa >= 0 && pb >= 0 && a_to_b[pa] == pb;
      out.push_back(std::move(e));
      consume_a(x);
      consume_b(y);
      break;
    }
  }

  for (int x = 0; x < na; ++x) {
    if (a_done[x]) continue;
    int y = a_to_b[x];
    if (y >= 0 && !b_done[y] && A.nodes[x].label != B.nodes[y].label)
      out.push_back(edit_for(EditKind::Update, x, y));
    if (a_del[x]) out.push_back(edit_for(EditKind::Delete, x, -1));
  }
  for (int y = 0; y < nb; ++y)
    if (!b_done[y] && b_ins[y]) out.push_back(edit_for(EditKind::Insert, -1, y));
  return out;
}

}  // namespace cdiag
