#include "epiveri/unfold.hpp"

#include <algorithm>
#include <sstream>

#include "epiveri/diag.hpp"
#include "epiveri/runs.hpp"

namespace epiveri {

namespace {

std::string indexed_name(const CheckedSystem& sys, int var, int idx) {
  return sys.var_names[var] + "^" + std::to_string(idx);
}

CExprPtr subst_vars(const CExprPtr& e, const std::vector<int>& gamma) {
  switch (e->kind) {
    case CExpr::Kind::Const:
      return e;
    case CExpr::Kind::Var:
      return CExpr::variable(gamma[e->var]);
    case CExpr::Kind::Not:
      return CExpr::negate(subst_vars(e->lhs, gamma));
    case CExpr::Kind::Bin:
      return CExpr::binary(e->op, subst_vars(e->lhs, gamma),
                           subst_vars(e->rhs, gamma));
  }
  return e;
}

}  // namespace

UnfoldedModel initial_model(const CheckedSystem& sys) {
  UnfoldedModel m;
  if (sys.init) {
    m.v_init = m.g.add_vertex("v_init");
    m.kind.push_back(UnfoldedModel::NodeKind::Free);
    m.formula.push_back(nullptr);
    m.node_var.push_back(-1);
    m.node_time.push_back(0);
  }
  std::vector<uint8_t> constrained(static_cast<size_t>(sys.num_vars()), 0);
  for (int v : sys.init_vars) constrained[v] = 1;
  m.gamma.resize(static_cast<size_t>(sys.num_vars()));
  for (int v = 0; v < sys.num_vars(); ++v) {
    int node = m.g.add_vertex(indexed_name(sys, v, 0));
    m.kind.push_back(constrained[v] ? UnfoldedModel::NodeKind::Init
                                    : UnfoldedModel::NodeKind::Free);
    m.formula.push_back(nullptr);
    m.node_var.push_back(v);
    m.node_time.push_back(0);
    if (constrained[v]) m.g.add_edge(m.v_init, node);
    m.gamma[v] = node;
  }
  m.snapshots.push_back(m.gamma);
  return m;
}

void apply_stmt(UnfoldedModel& m, const CheckedSystem& sys, const CStmt& st) {
  if (!st.is_rand && st.value->kind == CExpr::Kind::Var) {
    m.gamma[st.target] = m.gamma[st.value->var];
    ++m.aliased;
    return;
  }
  int idx = 0;
  for (int node = 0; node < m.g.size(); ++node) {
    if (m.node_var[node] == st.target) ++idx;
  }
  int node = m.g.add_vertex(indexed_name(sys, st.target, idx));
  m.node_var.push_back(st.target);
  m.node_time.push_back(m.horizon + 1);
  if (st.is_rand) {
    m.kind.push_back(UnfoldedModel::NodeKind::Free);
    m.formula.push_back(nullptr);
  } else {
    m.kind.push_back(UnfoldedModel::NodeKind::Assign);
    auto body = subst_vars(st.value, m.gamma);
    std::vector<int> reads;
    cexpr_vars(body, reads);
    for (int p : reads) m.g.add_edge(p, node);
    m.formula.push_back(std::move(body));
  }
  m.gamma[st.target] = node;
}

UnfoldedModel unfold(const CheckedSystem& sys, int k) {
  UnfoldedModel m = initial_model(sys);
  for (int t = 0; t < k; ++t) {
    for (const auto& st : sys.tick_statements(t)) {
      apply_stmt(m, sys, st);
    }
    ++m.horizon;
    m.snapshots.push_back(m.gamma);
  }
  return m;
}

CFormulaPtr timed_to_indexed(const CFormulaPtr& f, const UnfoldedModel& m,
                             int k) {
  const auto& gamma = m.snapshots.at(static_cast<size_t>(k));
  switch (f->kind) {
    case CFormula::Kind::Const:
      return f;
    case CFormula::Kind::Atom:
      return CFormula::atom(gamma[f->var]);
    case CFormula::Kind::Not:
      return CFormula::negate(timed_to_indexed(f->lhs, m, k));
    case CFormula::Kind::Bin:
      return CFormula::binary(f->op, timed_to_indexed(f->lhs, m, k),
                              timed_to_indexed(f->rhs, m, k));
    case CFormula::Kind::Knows:
      return CFormula::knows(f->agent, timed_to_indexed(f->lhs, m, k));
  }
  return f;
}

std::vector<int> observable_indexed(const CheckedSystem& sys,
                                    const UnfoldedModel& m, int agent, int k) {
  std::vector<int> out;
  for (int t = 0; t <= k; ++t) {
    const auto& gamma = m.snapshots.at(static_cast<size_t>(t));
    for (int v : sys.agents[agent].observable) out.push_back(gamma[v]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string timed_label(const UnfoldedModel& m, const CheckedSystem& sys,
                        int node) {
  if (node == m.v_init) return "init";
  return timed_name(sys, m.node_var[node], m.node_time[node]);
}

StructuredModel concretize(const UnfoldedModel& m, const CheckedSystem& sys) {
  StructuredModel out;
  out.g = m.g;
  auto assigns = sys.init ? init_assignments(sys)
                          : std::vector<std::vector<std::pair<int, uint8_t>>>{};
  // Initial-condition values by (variable, assignment row).
  std::vector<std::vector<uint8_t>> init_val(
      static_cast<size_t>(sys.num_vars()));
  for (size_t a = 0; a < assigns.size(); ++a) {
    for (auto [v, b] : assigns[a]) {
      init_val[v].resize(assigns.size());
      init_val[v][a] = b;
    }
  }
  // Rows are built in the relation's sorted-variable order via a column
  // permutation of (own vertex, parents...).
  auto build = [&](int node, const std::vector<int>& parents, auto value_fn) {
    std::vector<std::string> raw{m.g.names[node]};
    std::vector<int> frames{node == m.v_init
                                ? static_cast<int>(assigns.size())
                                : 2};
    for (int p : parents) {
      raw.push_back(m.g.names[p]);
      frames.push_back(p == m.v_init ? static_cast<int>(assigns.size()) : 2);
    }
    std::vector<int> perm(raw.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return raw[a] < raw[b]; });
    Relation r;
    for (int c : perm) {
      r.vars.push_back(raw[c]);
      r.frame[raw[c]] = frames[c];
    }
    std::vector<uint32_t> combo(parents.size(), 0);
    while (true) {
      uint32_t own = value_fn(combo);
      if (own != ~uint32_t{0}) {
        std::vector<uint32_t> raw_row{own};
        raw_row.insert(raw_row.end(), combo.begin(), combo.end());
        std::vector<uint32_t> row(raw_row.size());
        for (size_t c = 0; c < perm.size(); ++c) row[c] = raw_row[perm[c]];
        r.rows.push_back(std::move(row));
      }
      size_t i = 0;
      while (i < combo.size() &&
             ++combo[i] == static_cast<uint32_t>(frames[i + 1])) {
        combo[i] = 0;
        ++i;
      }
      if (i == combo.size()) break;
    }
    std::sort(r.rows.begin(), r.rows.end());
    return r;
  };
  for (int node = 0; node < m.g.size(); ++node) {
    const auto& parents = m.g.parents[node];
    if (node == m.v_init) {
      Relation r;
      r.vars = {"v_init"};
      r.frame["v_init"] = static_cast<int>(assigns.size());
      for (uint32_t a = 0; a < assigns.size(); ++a) r.rows.push_back({a});
      out.node.push_back(std::move(r));
      continue;
    }
    switch (m.kind[node]) {
      case UnfoldedModel::NodeKind::Free: {
        Relation r;
        r.vars = {m.g.names[node]};
        r.frame[m.g.names[node]] = 2;
        r.rows = {{0}, {1}};
        out.node.push_back(std::move(r));
        break;
      }
      case UnfoldedModel::NodeKind::Init:
        out.node.push_back(
            build(node, parents, [&](const std::vector<uint32_t>& combo) {
              return static_cast<uint32_t>(
                  init_val[m.node_var[node]][combo[0]]);
            }));
        break;
      case UnfoldedModel::NodeKind::Assign: {
        std::vector<uint8_t> probe(static_cast<size_t>(m.g.size()), 0);
        out.node.push_back(
            build(node, parents, [&](const std::vector<uint32_t>& combo) {
              for (size_t i = 0; i < parents.size(); ++i) {
                probe[parents[i]] = static_cast<uint8_t>(combo[i]);
              }
              return static_cast<uint32_t>(
                  m.formula[node]->eval_bool(probe.data()) ? 1 : 0);
            }));
        break;
      }
    }
  }
  return out;
}

std::string dot_unfolded(const UnfoldedModel& m, const CheckedSystem& sys,
                         const std::vector<int>& boxed) {
  std::vector<uint8_t> in_box(static_cast<size_t>(m.g.size()), 0);
  for (int v : boxed) in_box[v] = 1;
  std::vector<int> order(static_cast<size_t>(m.g.size()));
  for (int v = 0; v < m.g.size(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return indexed_less(m.g.names[a], m.g.names[b]);
  });
  std::ostringstream os;
  os << "digraph unfolded {\n";
  for (int v : order) {
    os << "  \"" << m.g.names[v] << "\" [label=\"" << timed_label(m, sys, v)
       << "\"";
    if (in_box[v]) os << " shape=box";
    os << "];\n";
  }
  for (int v : order) {
    auto ps = m.g.parents[v];
    std::sort(ps.begin(), ps.end(), [&](int a, int b) {
      return indexed_less(m.g.names[a], m.g.names[b]);
    });
    for (int p : ps) {
      os << "  \"" << m.g.names[p] << "\" -> \"" << m.g.names[v] << "\";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace epiveri
