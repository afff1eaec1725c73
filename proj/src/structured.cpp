#include "epiveri/structured.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "epiveri/diag.hpp"

namespace epiveri {

namespace {

std::pair<std::string, long> split_indexed(const std::string& name) {
  auto pos = name.rfind('^');
  if (pos == std::string::npos || pos + 1 == name.size()) return {name, -1};
  for (size_t i = pos + 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return {name, -1};
  }
  return {name.substr(0, pos), std::stol(name.substr(pos + 1))};
}

std::vector<uint8_t> member_set(int n, const std::vector<int>& xs) {
  std::vector<uint8_t> in(static_cast<size_t>(n), 0);
  for (int v : xs) in[v] = 1;
  return in;
}

std::vector<int> sorted_ids(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Induced subgraph on keep, moralized: undirected parent-child edges plus
// marriages between parents (within keep) of a common kept child.
UGraph moralize_restricted(const Digraph& g, const std::vector<uint8_t>& keep) {
  UGraph adj(g.names.size());
  auto connect = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int v = 0; v < g.size(); ++v) {
    if (!keep[v]) continue;
    const auto& ps = g.parents[v];
    for (size_t i = 0; i < ps.size(); ++i) {
      if (!keep[ps[i]]) continue;
      connect(ps[i], v);
      for (size_t j = i + 1; j < ps.size(); ++j) {
        if (keep[ps[j]]) connect(ps[i], ps[j]);
      }
    }
  }
  for (auto& ns : adj) {
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  }
  return adj;
}

Relation rename_var(const Relation& s, const std::string& from,
                    const std::string& to) {
  if (std::binary_search(s.vars.begin(), s.vars.end(), to)) {
    throw Error(ErrorKind::PreconditionViolated,
                "relation already ranges over '" + to + "'");
  }
  Relation out;
  out.vars = s.vars;
  auto it = std::find(out.vars.begin(), out.vars.end(), from);
  *it = to;
  // Columns move to keep the variable list sorted.
  std::vector<int> perm(out.vars.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return out.vars[a] < out.vars[b]; });
  std::vector<std::string> vars(out.vars.size());
  for (size_t i = 0; i < perm.size(); ++i) vars[i] = out.vars[perm[i]];
  out.vars = std::move(vars);
  for (const auto& [v, m] : s.frame) out.frame[v == from ? to : v] = m;
  out.rows.reserve(s.rows.size());
  for (const auto& row : s.rows) {
    std::vector<uint32_t> next(row.size());
    for (size_t i = 0; i < perm.size(); ++i) next[i] = row[perm[i]];
    out.rows.push_back(std::move(next));
  }
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

}  // namespace

bool indexed_less(const std::string& a, const std::string& b) {
  auto [ab, ai] = split_indexed(a);
  auto [bb, bi] = split_indexed(b);
  if (ab != bb) return ab < bb;
  return ai < bi;
}

int Digraph::add_vertex(const std::string& name) {
  auto [it, fresh] = index.emplace(name, size());
  if (!fresh) {
    throw Error(ErrorKind::DuplicateName, "duplicate vertex '" + name + "'");
  }
  names.push_back(name);
  parents.emplace_back();
  children.emplace_back();
  return it->second;
}

int Digraph::vertex(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) {
    throw Error(ErrorKind::UnknownVariable, "no vertex '" + name + "'");
  }
  return it->second;
}

bool Digraph::has_vertex(const std::string& name) const {
  return index.count(name) != 0;
}

bool Digraph::has_edge(int u, int v) const {
  const auto& ps = parents[v];
  return std::find(ps.begin(), ps.end(), u) != ps.end();
}

void Digraph::add_edge(int u, int v) {
  if (has_edge(u, v)) return;
  parents[v].push_back(u);
  children[u].push_back(v);
}

std::vector<int> ancestors(const Digraph& g, const std::vector<int>& x) {
  std::vector<uint8_t> seen(g.names.size(), 0);
  std::vector<int> stack = x;
  for (int v : x) seen[v] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int p : g.parents[v]) {
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < g.size(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

UGraph moralize(const Digraph& g) {
  return moralize_restricted(g, std::vector<uint8_t>(g.names.size(), 1));
}

bool d_separated(const Digraph& g, const std::vector<int>& x,
                 const std::vector<int>& y, const std::vector<int>& z) {
  auto in_x = member_set(g.size(), x);
  auto in_y = member_set(g.size(), y);
  auto in_z = member_set(g.size(), z);
  for (int v = 0; v < g.size(); ++v) {
    if (in_x[v] + in_y[v] + in_z[v] > 1) {
      throw Error(ErrorKind::NonDisjointSets,
                  "sets share vertex '" + g.names[v] + "'");
    }
  }
  std::vector<int> seeds;
  seeds.insert(seeds.end(), x.begin(), x.end());
  seeds.insert(seeds.end(), y.begin(), y.end());
  seeds.insert(seeds.end(), z.begin(), z.end());
  auto keep = member_set(g.size(), ancestors(g, seeds));
  auto adj = moralize_restricted(g, keep);
  std::vector<uint8_t> seen(g.names.size(), 0);
  std::vector<int> stack;
  for (int v : x) {
    seen[v] = 1;
    stack.push_back(v);
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (in_y[v]) return false;
    if (in_z[v]) continue;  // blocked; conditioning vertices absorb paths
    for (int n : adj[v]) {
      if (!seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
    }
  }
  return true;
}

bool d_separated_query(const Digraph& g, const std::vector<int>& x,
                       const std::vector<int>& y, const std::vector<int>& z) {
  auto in_z = member_set(g.size(), z);
  std::vector<int> xs, ys;
  for (int v : x) {
    if (!in_z[v]) xs.push_back(v);
  }
  for (int v : y) {
    if (!in_z[v]) ys.push_back(v);
  }
  xs = sorted_ids(std::move(xs));
  ys = sorted_ids(std::move(ys));
  std::vector<int> both;
  std::set_intersection(xs.begin(), xs.end(), ys.begin(), ys.end(),
                        std::back_inserter(both));
  if (!both.empty()) return false;
  return d_separated(g, xs, ys, sorted_ids(z));
}

std::vector<int> minimal_blocker(const Digraph& g, const std::vector<int>& k,
                                 const std::vector<int>& o) {
  auto in_o = member_set(g.size(), o);
  std::vector<int> seeds;
  seeds.insert(seeds.end(), k.begin(), k.end());
  seeds.insert(seeds.end(), o.begin(), o.end());
  auto keep = member_set(g.size(), ancestors(g, seeds));
  auto adj = moralize_restricted(g, keep);
  std::vector<uint8_t> seen(g.names.size(), 0);
  std::vector<int> stack;
  for (int v : k) {
    if (!in_o[v] && !seen[v]) {
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  std::vector<int> w;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int n : adj[v]) {
      if (seen[n]) continue;
      seen[n] = 1;
      if (in_o[n]) {
        w.push_back(n);  // first observable on the path; stop here
      } else {
        stack.push_back(n);
      }
    }
  }
  for (int v : k) {
    if (in_o[v]) w.push_back(v);
  }
  return sorted_ids(std::move(w));
}

namespace {

void relevance_rec(const Digraph& g, const std::vector<std::vector<int>>& obs,
                   const CFormulaPtr& f,
                   std::unordered_map<const CFormula*, std::vector<int>>& memo,
                   std::vector<int>& out) {
  if (!f) return;
  auto it = memo.find(f.get());
  if (it != memo.end()) {
    out.insert(out.end(), it->second.begin(), it->second.end());
    return;
  }
  std::vector<int> mine;
  switch (f->kind) {
    case CFormula::Kind::Const:
      break;
    case CFormula::Kind::Atom:
      mine.push_back(f->var);
      break;
    case CFormula::Kind::Not:
      relevance_rec(g, obs, f->lhs, memo, mine);
      break;
    case CFormula::Kind::Bin:
      relevance_rec(g, obs, f->lhs, memo, mine);
      relevance_rec(g, obs, f->rhs, memo, mine);
      break;
    case CFormula::Kind::Knows: {
      relevance_rec(g, obs, f->lhs, memo, mine);
      mine = sorted_ids(std::move(mine));
      auto u = minimal_blocker(g, mine, obs[f->agent]);
      mine.insert(mine.end(), u.begin(), u.end());
      break;
    }
  }
  mine = sorted_ids(std::move(mine));
  out.insert(out.end(), mine.begin(), mine.end());
  memo.emplace(f.get(), std::move(mine));
}

}  // namespace

std::vector<int> relevance(const Digraph& g,
                           const std::vector<std::vector<int>>& obs,
                           const CFormulaPtr& f) {
  std::unordered_map<const CFormula*, std::vector<int>> memo;
  std::vector<int> out;
  relevance_rec(g, obs, f, memo, out);
  return sorted_ids(std::move(out));
}

std::vector<int> removable_leaves(const Digraph& g,
                                  const std::vector<int>& keep) {
  auto in_keep = member_set(g.size(), keep);
  std::vector<int> fanout(g.names.size());
  std::set<int> leaves;
  for (int v = 0; v < g.size(); ++v) {
    fanout[v] = static_cast<int>(g.children[v].size());
    if (fanout[v] == 0 && !in_keep[v]) leaves.insert(v);
  }
  std::vector<int> removed;
  while (!leaves.empty()) {
    int v = *leaves.begin();
    leaves.erase(leaves.begin());
    removed.push_back(v);
    for (int p : g.parents[v]) {
      if (--fanout[p] == 0 && !in_keep[p]) leaves.insert(p);
    }
  }
  return removed;
}

Relation joint(const StructuredModel& m) { return combine_all(m.node); }

bool validate_structured(const StructuredModel& m, std::string* why) {
  auto fail = [&](int v, const std::string& what) {
    if (why) *why = "vertex '" + m.g.names[v] + "': " + what;
    return false;
  };
  if (m.node.size() != m.g.names.size()) {
    if (why) *why = "node relation count differs from vertex count";
    return false;
  }
  for (int v = 0; v < m.g.size(); ++v) {
    std::vector<std::string> want{m.g.names[v]};
    for (int p : m.g.parents[v]) want.push_back(m.g.names[p]);
    std::sort(want.begin(), want.end());
    if (m.node[v].vars != want) {
      return fail(v, "relation domain is not the vertex and its parents");
    }
    std::vector<std::string> pa = want;
    pa.erase(std::find(pa.begin(), pa.end(), m.g.names[v]));
    Frames pf;
    for (const auto& p : pa) pf[p] = m.node[v].frame.at(p);
    if (marginalize(m.node[v], pa) != identity(pa, pf)) {
      return fail(v, "relation constrains its parents");
    }
  }
  return true;
}

StructuredModel leaf_eliminate(const StructuredModel& m,
                               const std::vector<int>& x) {
  auto removed = removable_leaves(m.g, x);
  auto gone = member_set(m.g.size(), removed);
  StructuredModel out;
  std::vector<int> fresh(m.g.names.size(), -1);
  for (int v = 0; v < m.g.size(); ++v) {
    if (gone[v]) continue;
    fresh[v] = out.g.add_vertex(m.g.names[v]);
    out.node.push_back(m.node[v]);
  }
  for (int v = 0; v < m.g.size(); ++v) {
    if (gone[v]) continue;
    for (int c : m.g.children[v]) {
      if (!gone[c]) out.g.add_edge(fresh[v], fresh[c]);
    }
  }
  return out;
}

StructuredModel rename_equality(const StructuredModel& m, int x, int y) {
  const auto& xn = m.g.names[x];
  const auto& yn = m.g.names[y];
  if (m.g.parents[y] != std::vector<int>{x}) {
    throw Error(ErrorKind::PreconditionViolated,
                "'" + yn + "' must have '" + xn + "' as its only parent");
  }
  int fx = m.node[x].frame.at(xn);
  int fy = m.node[y].frame.at(yn);
  if (fx != fy) {
    throw Error(ErrorKind::PreconditionViolated,
                "'" + xn + "' and '" + yn + "' have different frames");
  }
  const auto& sy = m.node[y];
  bool is_delta = sy.rows.size() == static_cast<size_t>(fy);
  for (const auto& row : sy.rows) {
    is_delta = is_delta && row.size() == 2 && row[0] == row[1];
  }
  if (!is_delta) {
    throw Error(ErrorKind::PreconditionViolated,
                "'" + yn + "' is not a pure copy of '" + xn + "'");
  }
  StructuredModel out;
  std::vector<int> fresh(m.g.names.size(), -1);
  for (int v = 0; v < m.g.size(); ++v) {
    if (v == x) continue;
    fresh[v] = out.g.add_vertex(m.g.names[v]);
    if (v == y) {
      out.node.push_back(rename_var(m.node[x], xn, yn));
    } else if (std::binary_search(m.node[v].vars.begin(),
                                  m.node[v].vars.end(), xn)) {
      out.node.push_back(rename_var(m.node[v], xn, yn));
    } else {
      out.node.push_back(m.node[v]);
    }
  }
  for (int v = 0; v < m.g.size(); ++v) {
    for (int c : m.g.children[v]) {
      int u2 = v == x ? fresh[y] : fresh[v];
      int c2 = c == x ? fresh[y] : fresh[c];
      if (u2 != c2) out.g.add_edge(u2, c2);
    }
  }
  return out;
}

namespace {

std::vector<int> display_order(const Digraph& g) {
  std::vector<int> order(g.names.size());
  for (int v = 0; v < g.size(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return indexed_less(g.names[a], g.names[b]);
  });
  return order;
}

void emit_vertices(std::ostringstream& os, const Digraph& g,
                   const std::vector<int>& boxed) {
  auto in_box = member_set(g.size(), boxed);
  for (int v : display_order(g)) {
    os << "  \"" << g.names[v] << "\"";
    if (in_box[v]) os << " [shape=box]";
    os << ";\n";
  }
}

}  // namespace

std::string dot_directed(const Digraph& g, const std::vector<int>& boxed) {
  std::ostringstream os;
  os << "digraph deps {\n";
  emit_vertices(os, g, boxed);
  for (int v : display_order(g)) {
    auto ps = g.parents[v];
    std::sort(ps.begin(), ps.end(), [&](int a, int b) {
      return indexed_less(g.names[a], g.names[b]);
    });
    for (int p : ps) {
      os << "  \"" << g.names[p] << "\" -> \"" << g.names[v] << "\";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string dot_moralized(const Digraph& g, const std::vector<int>& boxed) {
  auto adj = moralize(g);
  std::ostringstream os;
  os << "graph moral {\n";
  emit_vertices(os, g, boxed);
  auto order = display_order(g);
  std::vector<int> rank(g.names.size());
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  for (int v : order) {
    std::vector<int> ns = adj[v];
    std::sort(ns.begin(), ns.end(),
              [&](int a, int b) { return rank[a] < rank[b]; });
    for (int n : ns) {
      if (rank[n] > rank[v]) {
        os << "  \"" << g.names[v] << "\" -- \"" << g.names[n] << "\";\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace epiveri
