#include "epiveri/kripke.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "epiveri/diag.hpp"
#include "epiveri/pretty.hpp"

namespace epiveri {

namespace {

int agent_index(const std::vector<std::string>& agents,
                const std::string& name) {
  for (size_t i = 0; i < agents.size(); ++i) {
    if (agents[i] == name) return static_cast<int>(i);
  }
  throw Error(ErrorKind::UnboundVariable, "unknown agent '" + name + "'");
}

// Truth vectors per subformula occurrence, so Knows bodies are evaluated
// once per class instead of once per world.
class Evaluator {
 public:
  Evaluator(const Kripke& m, const AtomResolver& atoms)
      : m_(m), atoms_(atoms) {}

  const std::vector<uint8_t>& truth(const FormulaPtr& f) {
    auto it = memo_.find(f.get());
    if (it != memo_.end()) return it->second;
    std::vector<uint8_t> out(static_cast<size_t>(m_.num_worlds), 0);
    switch (f->kind) {
      case Formula::Kind::Const:
        std::fill(out.begin(), out.end(), f->cval ? 1 : 0);
        break;
      case Formula::Kind::Atom: {
        int idx = atoms_(f->ref);
        if (idx < 0 || idx >= static_cast<int>(m_.atoms.size())) {
          throw Error(ErrorKind::UnknownAtom,
                      "unknown atom '" + pretty_nameref(f->ref) + "'");
        }
        for (int w = 0; w < m_.num_worlds; ++w) out[w] = m_.val[w][idx];
        break;
      }
      case Formula::Kind::Unary: {
        const auto& a = truth(f->lhs);
        for (int w = 0; w < m_.num_worlds; ++w) out[w] = !a[w];
        break;
      }
      case Formula::Kind::Binary: {
        const auto& a = truth(f->lhs);
        const auto& b = truth(f->rhs);
        for (int w = 0; w < m_.num_worlds; ++w) {
          bool x = a[w], y = b[w], r = false;
          switch (f->op) {
            case BoolOp::And: r = x && y; break;
            case BoolOp::Or: r = x || y; break;
            case BoolOp::Xor: r = x != y; break;
            case BoolOp::Implies: r = !x || y; break;
            case BoolOp::Iff: r = x == y; break;
            case BoolOp::Neg: r = !x; break;
          }
          out[w] = r;
        }
        break;
      }
      case Formula::Kind::Knows: {
        int i = agent_index(m_.agents, f->agent);
        const auto& a = truth(f->lhs);
        std::unordered_map<int, uint8_t> all;
        for (int w = 0; w < m_.num_worlds; ++w) {
          int c = m_.eqclass[i][w];
          auto [it2, fresh] = all.emplace(c, 1);
          it2->second = static_cast<uint8_t>(it2->second && a[w]);
          (void)fresh;
        }
        for (int w = 0; w < m_.num_worlds; ++w) {
          out[w] = all[m_.eqclass[i][w]];
        }
        break;
      }
    }
    return memo_.emplace(f.get(), std::move(out)).first->second;
  }

 private:
  const Kripke& m_;
  const AtomResolver& atoms_;
  std::unordered_map<const Formula*, std::vector<uint8_t>> memo_;
};

void check_world(const Kripke& m, int world) {
  if (world < 0 || world >= m.num_worlds) {
    throw Error(ErrorKind::UnknownWorld,
                "world " + std::to_string(world) + " out of range (" +
                    std::to_string(m.num_worlds) + " worlds)");
  }
}

// Groups rows by their projection onto cols; class ids in first-seen order.
std::vector<int> classes_by_projection(
    const std::vector<std::vector<uint8_t>>& rows,
    const std::vector<int>& cols) {
  std::vector<int> out(rows.size(), 0);
  std::map<std::vector<uint8_t>, int> seen;
  std::vector<uint8_t> key(cols.size());
  for (size_t w = 0; w < rows.size(); ++w) {
    for (size_t j = 0; j < cols.size(); ++j) key[j] = rows[w][cols[j]];
    auto [it, fresh] = seen.emplace(key, static_cast<int>(seen.size()));
    (void)fresh;
    out[w] = it->second;
  }
  return out;
}

// Reorders variables lexicographically, permuting world columns and
// remapping observable indices to match.
void sort_vars(Evs& e) {
  std::vector<int> perm(e.vars.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return e.vars[a] < e.vars[b]; });
  std::vector<int> where(e.vars.size());
  for (size_t j = 0; j < perm.size(); ++j) where[perm[j]] = static_cast<int>(j);
  std::vector<std::string> vars(e.vars.size());
  for (size_t j = 0; j < perm.size(); ++j) vars[j] = e.vars[perm[j]];
  e.vars = std::move(vars);
  for (auto& row : e.worlds) {
    std::vector<uint8_t> next(row.size());
    for (size_t j = 0; j < perm.size(); ++j) next[j] = row[perm[j]];
    row = std::move(next);
  }
  for (auto& o : e.obs) {
    for (int& j : o) j = where[j];
    std::sort(o.begin(), o.end());
  }
}

}  // namespace

AtomResolver name_resolver(const std::vector<std::string>& names) {
  auto table = std::make_shared<std::unordered_map<std::string, int>>();
  for (size_t i = 0; i < names.size(); ++i) {
    table->emplace(names[i], static_cast<int>(i));
  }
  return [table](const NameRef& r) {
    auto it = table->find(pretty_nameref(r));
    return it == table->end() ? -1 : it->second;
  };
}

bool eval(const Kripke& m, int world, const FormulaPtr& f,
          const AtomResolver& atoms) {
  check_world(m, world);
  Evaluator ev(m, atoms);
  return ev.truth(f)[world] != 0;
}

bool eval(const Kripke& m, int world, const FormulaPtr& f) {
  return eval(m, world, f, name_resolver(m.atoms));
}

bool eval(const Evs& m, int world, const FormulaPtr& f,
          const AtomResolver& atoms) {
  return eval(ks_of(m), world, f, atoms);
}

bool eval(const Evs& m, int world, const FormulaPtr& f) {
  return eval(ks_of(m), world, f);
}

bool models(const Kripke& m, const FormulaPtr& f) {
  AtomResolver atoms = name_resolver(m.atoms);
  Evaluator ev(m, atoms);
  if (m.num_worlds == 0) return true;
  const auto& t = ev.truth(f);
  return std::all_of(t.begin(), t.end(), [](uint8_t b) { return b != 0; });
}

bool models(const Evs& m, const FormulaPtr& f) {
  return models(ks_of(m), f);
}

Kripke ks_of(const Evs& e) {
  Kripke m;
  m.atoms = e.vars;
  m.agents = e.agents;
  m.num_worlds = static_cast<int>(e.worlds.size());
  m.val = e.worlds;
  m.eqclass.reserve(e.agents.size());
  for (size_t i = 0; i < e.agents.size(); ++i) {
    m.eqclass.push_back(classes_by_projection(e.worlds, e.obs[i]));
  }
  return m;
}

Evs vs_of(const Kripke& m) {
  Evs e;
  e.agents = m.agents;
  e.vars = m.atoms;
  // One proposition per equivalence class ("the current world is in c"),
  // one per world; only the class propositions are observable.
  size_t base = m.atoms.size();
  std::vector<std::vector<int>> class_col(m.agents.size());
  e.obs.resize(m.agents.size());
  for (size_t i = 0; i < m.agents.size(); ++i) {
    int classes = 0;
    for (int w = 0; w < m.num_worlds; ++w) {
      classes = std::max(classes, m.eqclass[i][w] + 1);
    }
    class_col[i].resize(classes);
    for (int c = 0; c < classes; ++c) {
      class_col[i][c] = static_cast<int>(e.vars.size());
      e.obs[i].push_back(static_cast<int>(e.vars.size()));
      e.vars.push_back("sim." + m.agents[i] + ".c" + std::to_string(c));
    }
  }
  size_t world_base = e.vars.size();
  for (int w = 0; w < m.num_worlds; ++w) {
    e.vars.push_back("world." + std::to_string(w));
  }
  e.worlds.assign(m.num_worlds, std::vector<uint8_t>(e.vars.size(), 0));
  for (int w = 0; w < m.num_worlds; ++w) {
    auto& row = e.worlds[w];
    for (size_t j = 0; j < base; ++j) row[j] = m.val[w][j];
    for (size_t i = 0; i < m.agents.size(); ++i) {
      row[class_col[i][m.eqclass[i][w]]] = 1;
    }
    row[world_base + w] = 1;
  }
  sort_vars(e);
  return e;
}

bool is_bisimulation(const Kripke& a, const Kripke& b,
                     const std::vector<std::pair<int, int>>& r,
                     const std::vector<std::string>& u) {
  if (a.agents != b.agents) return false;
  std::vector<int> cols_a, cols_b;
  auto ra = name_resolver(a.atoms);
  auto rb = name_resolver(b.atoms);
  for (const auto& name : u) {
    NameRef ref;
    ref.name = name;
    int ia = ra(ref), ib = rb(ref);
    if (ia < 0 || ib < 0) {
      throw Error(ErrorKind::UnknownAtom, "unknown atom '" + name + "'");
    }
    cols_a.push_back(ia);
    cols_b.push_back(ib);
  }
  std::unordered_set<uint64_t> pairs;
  for (const auto& [w, wp] : r) {
    check_world(a, w);
    check_world(b, wp);
    pairs.insert(static_cast<uint64_t>(w) * b.num_worlds + wp);
  }
  auto related = [&](int w, int wp) {
    return pairs.count(static_cast<uint64_t>(w) * b.num_worlds + wp) != 0;
  };
  for (const auto& [w, wp] : r) {
    for (size_t j = 0; j < cols_a.size(); ++j) {
      if (a.val[w][cols_a[j]] != b.val[wp][cols_b[j]]) return false;
    }
    for (size_t i = 0; i < a.agents.size(); ++i) {
      for (int v = 0; v < a.num_worlds; ++v) {
        if (a.eqclass[i][v] != a.eqclass[i][w]) continue;
        bool found = false;
        for (int vp = 0; vp < b.num_worlds && !found; ++vp) {
          found = b.eqclass[i][vp] == b.eqclass[i][wp] && related(v, vp);
        }
        if (!found) return false;
      }
      for (int vp = 0; vp < b.num_worlds; ++vp) {
        if (b.eqclass[i][vp] != b.eqclass[i][wp]) continue;
        bool found = false;
        for (int v = 0; v < a.num_worlds && !found; ++v) {
          found = a.eqclass[i][v] == a.eqclass[i][w] && related(v, vp);
        }
        if (!found) return false;
      }
    }
  }
  return true;
}

bool is_total_bisimulation(const Kripke& a, const Kripke& b,
                           const std::vector<std::pair<int, int>>& r,
                           const std::vector<std::string>& u) {
  std::vector<uint8_t> hit_a(static_cast<size_t>(a.num_worlds), 0);
  std::vector<uint8_t> hit_b(static_cast<size_t>(b.num_worlds), 0);
  for (const auto& [w, wp] : r) {
    check_world(a, w);
    check_world(b, wp);
    hit_a[w] = 1;
    hit_b[wp] = 1;
  }
  auto all = [](const std::vector<uint8_t>& v) {
    return std::all_of(v.begin(), v.end(), [](uint8_t b2) { return b2 != 0; });
  };
  return all(hit_a) && all(hit_b) && is_bisimulation(a, b, r, u);
}

Evs marginalize_evs(const Evs& e, const std::vector<std::string>& x) {
  std::unordered_set<std::string> want(x.begin(), x.end());
  Evs out;
  out.agents = e.agents;
  std::vector<int> keep;
  for (size_t j = 0; j < e.vars.size(); ++j) {
    if (want.count(e.vars[j])) {
      keep.push_back(static_cast<int>(j));
      out.vars.push_back(e.vars[j]);
    }
  }
  out.worlds.reserve(e.worlds.size());
  for (const auto& row : e.worlds) {
    std::vector<uint8_t> next(keep.size());
    for (size_t j = 0; j < keep.size(); ++j) next[j] = row[keep[j]];
    out.worlds.push_back(std::move(next));
  }
  std::vector<int> where(e.vars.size(), -1);
  for (size_t j = 0; j < keep.size(); ++j) where[keep[j]] = static_cast<int>(j);
  out.obs.resize(e.obs.size());
  for (size_t i = 0; i < e.obs.size(); ++i) {
    for (int j : e.obs[i]) {
      if (where[j] >= 0) out.obs[i].push_back(where[j]);
    }
    std::sort(out.obs[i].begin(), out.obs[i].end());
  }
  sort_vars(out);
  std::sort(out.worlds.begin(), out.worlds.end());
  out.worlds.erase(std::unique(out.worlds.begin(), out.worlds.end()),
                   out.worlds.end());
  return out;
}

}  // namespace epiveri
