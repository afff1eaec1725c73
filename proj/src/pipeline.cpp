#include "epiveri/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "epiveri/diag.hpp"
#include "epiveri/relation.hpp"
#include "json.hpp"

namespace epiveri {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string primed(const std::string& name) { return name + "'"; }

// Boolean expression to BDD; name_of maps the expression's atom ids to
// manager variables.
template <typename NameOf>
BddRef expr_bdd(BddManager& man, const CExprPtr& e, const NameOf& name_of) {
  switch (e->kind) {
    case CExpr::Kind::Const:
      return man.constant(e->cval);
    case CExpr::Kind::Var:
      return man.var(name_of(e->var));
    case CExpr::Kind::Not:
      return man.negate(expr_bdd(man, e->lhs, name_of));
    case CExpr::Kind::Bin:
      return man.apply(e->op, expr_bdd(man, e->lhs, name_of),
                       expr_bdd(man, e->rhs, name_of));
  }
  throw Error(ErrorKind::Internal, "unhandled expression kind");
}

std::vector<std::string> sorted_names(const Digraph& g,
                                      const std::vector<int>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int v : ids) out.push_back(g.names[v]);
  std::sort(out.begin(), out.end());
  return out;
}

// Conjunction of the relations with every elim variable quantified away:
// each variable's relations are merged and the variable is eliminated from
// the product before the sweep moves on.
BddRef sweep(BddManager& man, std::vector<BddRef> rels,
             std::vector<std::vector<std::string>> doms,
             const std::vector<std::string>& elim) {
  std::vector<uint8_t> used(rels.size(), 0);
  for (const auto& x : elim) {
    std::vector<size_t> bucket;
    for (size_t i = 0; i < rels.size(); ++i) {
      if (!used[i] &&
          std::binary_search(doms[i].begin(), doms[i].end(), x)) {
        bucket.push_back(i);
      }
    }
    if (bucket.empty()) continue;
    for (size_t i : bucket) used[i] = 1;
    BddRef cur = rels[bucket[0]];
    for (size_t j = 1; j + 1 < bucket.size(); ++j) {
      cur = man.apply(BoolOp::And, cur, rels[bucket[j]]);
    }
    if (bucket.size() == 1) {
      cur = man.exists(cur, {x});
    } else {
      cur = man.and_exists(cur, rels[bucket.back()], {x});
    }
    std::vector<std::string> dom;
    for (size_t i : bucket) {
      dom.insert(dom.end(), doms[i].begin(), doms[i].end());
    }
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    dom.erase(std::remove(dom.begin(), dom.end(), x), dom.end());
    rels.push_back(cur);
    doms.push_back(std::move(dom));
    used.push_back(0);
  }
  BddRef worlds = man.constant(true);
  for (size_t i = 0; i < rels.size(); ++i) {
    if (!used[i]) worlds = man.apply(BoolOp::And, worlds, rels[i]);
  }
  return worlds;
}

struct EvalContext {
  BddManager& man;
  BddRef worlds;
  const std::vector<std::vector<std::string>>& agent_obs;  // kept, per agent
  const Digraph& g;
};

BddRef eval_set(const EvalContext& cx, const CFormulaPtr& f) {
  BddManager& man = cx.man;
  switch (f->kind) {
    case CFormula::Kind::Const:
      return f->cval ? cx.worlds : man.constant(false);
    case CFormula::Kind::Atom:
      return man.apply(BoolOp::And, cx.worlds, man.var(cx.g.names[f->var]));
    case CFormula::Kind::Not:
      return man.apply(BoolOp::And, cx.worlds,
                       man.negate(eval_set(cx, f->lhs)));
    case CFormula::Kind::Bin: {
      BddRef a = eval_set(cx, f->lhs);
      BddRef b = eval_set(cx, f->rhs);
      switch (f->op) {
        case BoolOp::And:
          return man.apply(BoolOp::And, a, b);
        case BoolOp::Or:
          return man.apply(BoolOp::Or, a, b);
        default:
          // Implies, Iff, Xor read membership of the two sets pointwise;
          // the result is cut back to the world space.
          return man.apply(BoolOp::And, cx.worlds, man.apply(f->op, a, b));
      }
    }
    case CFormula::Kind::Knows:
      return eval_knows(man, cx.worlds, cx.agent_obs[f->agent],
                        eval_set(cx, f->lhs));
  }
  throw Error(ErrorKind::Internal, "unhandled formula kind");
}

Verdict check_with(const CheckedSystem& sys, const CheckedSpec& spec,
                   bool baseline, const CheckOptions& opt) {
  Analysis a = analyze(sys, spec, baseline);
  const UnfoldedModel& m = a.model;
  const Digraph& g = m.g;

  Verdict verdict;
  ReductionStats& st = verdict.stats;
  st.unfold_ms = a.unfold_ms;
  st.analyze_ms = a.analyze_ms;
  st.total_nodes = g.size() + m.aliased;
  st.kappa_size = static_cast<int>(a.kappa.size());
  st.alias_removed = m.aliased;
  st.leaf_removed = static_cast<int>(a.removed.size());
  int alive_count = 0;
  for (uint8_t b : a.alive) alive_count += b;
  st.reduced_vertices = alive_count;
  st.reduced_vertices_no_init =
      alive_count - (m.v_init >= 0 && a.alive[m.v_init] ? 1 : 0);
  st.quantified = alive_count - st.kappa_size;
  st.kept_vars = st.kappa_size;

  auto t_build = Clock::now();
  std::vector<std::string> kappa_names = sorted_names(g, a.kappa);
  std::unordered_set<std::string> kappa_set(kappa_names.begin(),
                                            kappa_names.end());

  // The diagram works over the surviving vertices; variables of the
  // initial condition stay in even when leaf elimination dropped their
  // vertex, since the condition still constrains them.
  std::vector<uint8_t> in_bdd(g.size(), 0);
  for (int v = 0; v < g.size(); ++v) {
    if (v == m.v_init) continue;
    if (a.alive[v] || m.kind[v] == UnfoldedModel::NodeKind::Init) {
      in_bdd[v] = 1;
    }
  }

  std::vector<std::vector<std::string>> domains;
  for (int v = 0; v < g.size(); ++v) {
    if (!a.alive[v] || m.kind[v] != UnfoldedModel::NodeKind::Assign) continue;
    std::vector<std::string> dom{g.names[v]};
    for (int p : g.parents[v]) dom.push_back(g.names[p]);
    std::sort(dom.begin(), dom.end());
    domains.push_back(std::move(dom));
  }
  if (sys.init) {
    std::vector<std::string> dom;
    for (int w : sys.init_vars) dom.push_back(g.names[m.snapshots[0][w]]);
    std::sort(dom.begin(), dom.end());
    domains.push_back(std::move(dom));
  }

  std::vector<std::string> elim = elimination_order(domains, kappa_names);
  if (opt.order_override) {
    std::vector<std::string> want = elim;
    std::vector<std::string> got = *opt.order_override;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) {
      throw Error(ErrorKind::BadOrder,
                  "override is not a permutation of the eliminated variables");
    }
    elim = *opt.order_override;
  }

  // Diagram levels: reversed total elimination order, primed copy of every
  // kept variable directly below its original.
  std::vector<std::string> total = elimination_order(domains, {});
  std::unordered_set<std::string> placed(total.begin(), total.end());
  std::vector<std::string> loose;
  for (int v = 0; v < g.size(); ++v) {
    if (in_bdd[v] && !placed.count(g.names[v])) loose.push_back(g.names[v]);
  }
  std::sort(loose.begin(), loose.end(), indexed_less);
  total.insert(total.end(), loose.begin(), loose.end());
  std::reverse(total.begin(), total.end());
  std::vector<std::string> levels;
  for (const auto& name : total) {
    levels.push_back(name);
    if (kappa_set.count(name)) levels.push_back(primed(name));
  }

  BddManager man(levels);
  if (opt.timeout_seconds) {
    man.set_deadline(Clock::now() +
                     std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(*opt.timeout_seconds)));
  }

  std::vector<BddRef> rels;
  std::vector<std::vector<std::string>> doms;
  for (int v = 0; v < g.size(); ++v) {
    if (!a.alive[v] || m.kind[v] != UnfoldedModel::NodeKind::Assign) continue;
    BddRef body =
        expr_bdd(man, m.formula[v], [&](int p) { return g.names[p]; });
    rels.push_back(man.apply(BoolOp::Iff, man.var(g.names[v]), body));
    std::vector<std::string> dom{g.names[v]};
    for (int p : g.parents[v]) dom.push_back(g.names[p]);
    std::sort(dom.begin(), dom.end());
    doms.push_back(std::move(dom));
  }
  if (sys.init) {
    rels.push_back(expr_bdd(
        man, sys.init, [&](int w) { return g.names[m.snapshots[0][w]]; }));
    std::vector<std::string> dom;
    for (int w : sys.init_vars) dom.push_back(g.names[m.snapshots[0][w]]);
    std::sort(dom.begin(), dom.end());
    doms.push_back(std::move(dom));
  }

  BddRef worlds = sweep(man, std::move(rels), std::move(doms), elim);
  st.build_ms = ms_since(t_build);
  if (worlds == man.constant(false)) {
    throw Error(ErrorKind::UnsatisfiableInit,
                "no state satisfies the initial condition");
  }

  auto t_check = Clock::now();
  std::vector<std::vector<std::string>> agent_obs(sys.agents.size());
  for (size_t i = 0; i < sys.agents.size(); ++i) {
    std::vector<int> kept;
    std::set_intersection(a.obs[i].begin(), a.obs[i].end(), a.kappa.begin(),
                          a.kappa.end(), std::back_inserter(kept));
    agent_obs[i] = sorted_names(g, kept);
  }
  EvalContext cx{man, worlds, agent_obs, g};
  BddRef sat = eval_set(cx, a.phi);
  BddRef bad = man.apply(BoolOp::And, worlds, man.negate(sat));
  verdict.holds = bad == man.constant(false);
  if (!verdict.holds) {
    std::unordered_map<std::string, bool> assign;
    auto witness = *man.any_sat(bad);
    for (const auto& [name, bit] : witness) assign[name] = bit;
    std::vector<int> order = a.kappa;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return std::tie(m.node_time[x], m.node_var[x]) <
             std::tie(m.node_time[y], m.node_var[y]);
    });
    for (int v : order) {
      auto it = assign.find(g.names[v]);
      int value = it == assign.end() ? -1 : (it->second ? 1 : 0);
      verdict.counterexample.push_back(CexEntry{timed_label(m, sys, v), value});
    }
  }
  st.check_ms = ms_since(t_check);
  return verdict;
}

}  // namespace

Analysis analyze(const CheckedSystem& sys, const CheckedSpec& spec,
                 bool baseline) {
  Analysis a;
  auto t0 = Clock::now();
  a.model = unfold(sys, spec.time);
  a.phi = timed_to_indexed(spec.body, a.model, spec.time);
  a.unfold_ms = ms_since(t0);

  auto t1 = Clock::now();
  a.obs.resize(sys.agents.size());
  for (size_t i = 0; i < sys.agents.size(); ++i) {
    a.obs[i] =
        observable_indexed(sys, a.model, static_cast<int>(i), spec.time);
  }
  if (baseline) {
    a.kappa = cformula_atoms(a.phi);
    for (int i : cformula_agents(a.phi)) {
      a.kappa.insert(a.kappa.end(), a.obs[i].begin(), a.obs[i].end());
    }
    std::sort(a.kappa.begin(), a.kappa.end());
    a.kappa.erase(std::unique(a.kappa.begin(), a.kappa.end()), a.kappa.end());
  } else {
    a.kappa = relevance(a.model.g, a.obs, a.phi);
  }
  a.removed = removable_leaves(a.model.g, a.kappa);
  a.alive.assign(a.model.g.size(), 1);
  for (int v : a.removed) a.alive[v] = 0;
  a.analyze_ms = ms_since(t1);
  return a;
}

Digraph reduced_graph(const Analysis& a, std::vector<int>* boxed_out) {
  Digraph out;
  const Digraph& g = a.model.g;
  std::vector<int> remap(g.size(), -1);
  for (int v = 0; v < g.size(); ++v) {
    if (a.alive[v]) remap[v] = out.add_vertex(g.names[v]);
  }
  for (int v = 0; v < g.size(); ++v) {
    if (!a.alive[v]) continue;
    for (int c : g.children[v]) {
      if (a.alive[c]) out.add_edge(remap[v], remap[c]);
    }
  }
  if (boxed_out) {
    boxed_out->clear();
    for (int v : a.kappa) {
      if (remap[v] >= 0) boxed_out->push_back(remap[v]);
    }
  }
  return out;
}

Verdict check_optimized(const CheckedSystem& sys, const CheckedSpec& spec,
                        const CheckOptions& opt) {
  return check_with(sys, spec, false, opt);
}

Verdict check_baseline(const CheckedSystem& sys, const CheckedSpec& spec,
                       const CheckOptions& opt) {
  return check_with(sys, spec, true, opt);
}

BddRef eval_knows(BddManager& man, BddRef worlds,
                  const std::vector<std::string>& obs, BddRef phi_set) {
  BddRef bad = man.apply(BoolOp::And, worlds, man.negate(phi_set));
  std::vector<std::pair<std::string, std::string>> map;
  std::vector<std::string> quant;
  for (const auto& v : man.support(bad)) {
    map.emplace_back(v, primed(v));
    quant.push_back(primed(v));
  }
  BddRef badp = man.rename(bad, map);
  BddRef eq = man.constant(true);
  for (const auto& v : obs) {
    eq = man.apply(BoolOp::And, eq,
                   man.apply(BoolOp::Iff, man.var(v), man.var(primed(v))));
    quant.push_back(primed(v));
  }
  std::sort(quant.begin(), quant.end());
  quant.erase(std::unique(quant.begin(), quant.end()), quant.end());
  BddRef reachable_bad = man.and_exists(badp, eq, quant);
  return man.apply(BoolOp::And, worlds, man.negate(reachable_bad));
}

std::string verdict_json(
    const Verdict& v,
    const std::vector<std::pair<std::string, std::string>>& extra) {
  nlohmann::json j;
  j["holds"] = v.holds;
  if (v.holds) {
    j["counterexample"] = nullptr;
  } else {
    nlohmann::json cex = nlohmann::json::object();
    for (const auto& e : v.counterexample) {
      if (e.value < 0) {
        cex[e.name] = nullptr;
      } else {
        cex[e.name] = e.value == 1;
      }
    }
    j["counterexample"] = cex;
  }
  j["stats"] = {
      {"total_nodes", v.stats.total_nodes},
      {"kappa_size", v.stats.kappa_size},
      {"alias_removed", v.stats.alias_removed},
      {"leaf_removed", v.stats.leaf_removed},
      {"quantified", v.stats.quantified},
      {"kept_vars", v.stats.kept_vars},
      {"reduced_vertices", v.stats.reduced_vertices},
      {"reduced_vertices_no_init", v.stats.reduced_vertices_no_init},
      {"unfold_ms", v.stats.unfold_ms},
      {"analyze_ms", v.stats.analyze_ms},
      {"build_ms", v.stats.build_ms},
      {"check_ms", v.stats.check_ms},
  };
  for (const auto& [key, value] : extra) j[key] = value;
  return j.dump(2);
}

}  // namespace epiveri
