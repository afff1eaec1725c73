#include "epiveri/checker.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace epiveri {

CExprPtr CExpr::constant(bool v) {
  auto e = std::make_shared<CExpr>();
  e->kind = Kind::Const;
  e->cval = v;
  return e;
}
CExprPtr CExpr::variable(int var) {
  auto e = std::make_shared<CExpr>();
  e->kind = Kind::Var;
  e->var = var;
  return e;
}
CExprPtr CExpr::negate(CExprPtr x) {
  auto e = std::make_shared<CExpr>();
  e->kind = Kind::Not;
  e->lhs = std::move(x);
  return e;
}
CExprPtr CExpr::binary(BoolOp op, CExprPtr l, CExprPtr r) {
  auto e = std::make_shared<CExpr>();
  e->kind = Kind::Bin;
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

bool CExpr::eval_bool(const uint8_t* state) const {
  switch (kind) {
    case Kind::Const: return cval;
    case Kind::Var: return state[var] != 0;
    case Kind::Not: return !lhs->eval_bool(state);
    case Kind::Bin: {
      bool a = lhs->eval_bool(state);
      bool b = rhs->eval_bool(state);
      switch (op) {
        case BoolOp::And: return a && b;
        case BoolOp::Or: return a || b;
        case BoolOp::Xor: return a != b;
        case BoolOp::Implies: return !a || b;
        case BoolOp::Iff: return a == b;
        case BoolOp::Neg: break;
      }
      break;
    }
  }
  return false;
}

uint64_t CExpr::eval_lanes(const uint64_t* state) const {
  switch (kind) {
    case Kind::Const: return cval ? ~uint64_t(0) : 0;
    case Kind::Var: return state[var];
    case Kind::Not: return ~lhs->eval_lanes(state);
    case Kind::Bin: {
      uint64_t a = lhs->eval_lanes(state);
      uint64_t b = rhs->eval_lanes(state);
      switch (op) {
        case BoolOp::And: return a & b;
        case BoolOp::Or: return a | b;
        case BoolOp::Xor: return a ^ b;
        case BoolOp::Implies: return ~a | b;
        case BoolOp::Iff: return ~(a ^ b);
        case BoolOp::Neg: break;
      }
      break;
    }
  }
  return 0;
}

namespace {

void cexpr_vars_rec(const CExpr* e, std::set<int>& out) {
  if (!e) return;
  if (e->kind == CExpr::Kind::Var) out.insert(e->var);
  cexpr_vars_rec(e->lhs.get(), out);
  cexpr_vars_rec(e->rhs.get(), out);
}

}  // namespace

void cexpr_vars(const CExprPtr& e, std::vector<int>& out) {
  std::set<int> s(out.begin(), out.end());
  cexpr_vars_rec(e.get(), s);
  out.assign(s.begin(), s.end());
}

CFormulaPtr CFormula::constant(bool v) {
  auto f = std::make_shared<CFormula>();
  f->kind = Kind::Const;
  f->cval = v;
  return f;
}
CFormulaPtr CFormula::atom(int var) {
  auto f = std::make_shared<CFormula>();
  f->kind = Kind::Atom;
  f->var = var;
  return f;
}
CFormulaPtr CFormula::negate(CFormulaPtr x) {
  auto f = std::make_shared<CFormula>();
  f->kind = Kind::Not;
  f->lhs = std::move(x);
  return f;
}
CFormulaPtr CFormula::binary(BoolOp op, CFormulaPtr l, CFormulaPtr r) {
  auto f = std::make_shared<CFormula>();
  f->kind = Kind::Bin;
  f->op = op;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}
CFormulaPtr CFormula::knows(int agent, CFormulaPtr x) {
  auto f = std::make_shared<CFormula>();
  f->kind = Kind::Knows;
  f->agent = agent;
  f->lhs = std::move(x);
  return f;
}

namespace {

void walk_cformula(const CFormula* f, std::set<int>& atoms,
                   std::set<int>& agents) {
  if (!f) return;
  if (f->kind == CFormula::Kind::Atom) atoms.insert(f->var);
  if (f->kind == CFormula::Kind::Knows) agents.insert(f->agent);
  walk_cformula(f->lhs.get(), atoms, agents);
  walk_cformula(f->rhs.get(), atoms, agents);
}

}  // namespace

std::vector<int> cformula_atoms(const CFormulaPtr& f) {
  std::set<int> atoms, agents;
  walk_cformula(f.get(), atoms, agents);
  return {atoms.begin(), atoms.end()};
}

std::vector<int> cformula_agents(const CFormulaPtr& f) {
  std::set<int> atoms, agents;
  walk_cformula(f.get(), atoms, agents);
  return {agents.begin(), agents.end()};
}

int cformula_k_depth(const CFormulaPtr& f) {
  if (!f) return 0;
  int d = std::max(cformula_k_depth(f->lhs), cformula_k_depth(f->rhs));
  return f->kind == CFormula::Kind::Knows ? d + 1 : d;
}

int CheckedSystem::agent_id(const std::string& name) const {
  for (size_t i = 0; i < agents.size(); ++i)
    if (agents[i].name == name) return (int)i;
  return -1;
}

std::vector<CStmt> CheckedSystem::tick_statements(int t) const {
  std::vector<CStmt> out;
  for (const AgentInfo& a : agents) {
    if (t < (int)a.actions.size())
      out.insert(out.end(), a.actions[t].begin(), a.actions[t].end());
  }
  out.insert(out.end(), env.begin(), env.end());
  return out;
}

std::vector<std::pair<int, int>> formula_vars(const CFormulaPtr& f, int k) {
  std::vector<std::pair<int, int>> out;
  for (int v : cformula_atoms(f)) out.emplace_back(v, k);
  return out;
}

int select_spec(const CheckedSystem& sys,
                const std::optional<std::string>& label) {
  if (sys.specs.empty())
    throw Error(ErrorKind::BadParams, sys.filename + ": script has no specs");
  if (!label) return 0;
  std::vector<int> partial;
  for (size_t i = 0; i < sys.specs.size(); ++i) {
    const auto& l = sys.specs[i].label;
    if (!l) continue;
    if (*l == *label) return (int)i;
    if (l->find(*label) != std::string::npos) partial.push_back((int)i);
  }
  if (partial.size() == 1) return partial[0];
  throw Error(ErrorKind::BadParams,
              partial.empty()
                  ? "no spec labeled '" + *label + "'"
                  : "spec label '" + *label + "' is ambiguous");
}

namespace {

// How a formal parameter is bound: one variable id (scalar) or the ids of a
// whole array, in element order.
struct Binding {
  bool is_array = false;
  std::vector<int> ids;
};

class Checker {
 public:
  explicit Checker(const Script& s) : script_(s) {}

  CheckedSystem run() {
    sys_.filename = script_.filename;
    collect_aliases();
    declare_globals();
    collect_protocols();
    bind_agents();
    compile_init();
    compile_env();
    pad_actions();
    compile_specs();
    return std::move(sys_);
  }

 private:
  const Script& script_;
  CheckedSystem sys_;
  std::map<std::string, int> alias_size_;
  // Global base name -> (first id, element count); count 0 marks a scalar.
  std::map<std::string, std::pair<int, int>> global_shape_;
  std::map<std::string, const ProtocolDecl*> protocols_;
  // Per agent: local base name -> (first id, count), formal name -> Binding.
  std::vector<std::map<std::string, std::pair<int, int>>> local_shape_;

  [[noreturn]] void fail(ErrorKind kind, SourcePos pos,
                         const std::string& msg) {
    throw ScriptError(kind, script_.filename, pos, msg);
  }

  int add_var(const std::string& name, SourcePos pos) {
    if (sys_.var_index.count(name))
      fail(ErrorKind::DuplicateName, pos, "duplicate variable '" + name + "'");
    sys_.var_index[name] = (int)sys_.var_names.size();
    sys_.var_names.push_back(name);
    return (int)sys_.var_names.size() - 1;
  }

  int type_size(const TypeSpec& t) {
    switch (t.kind) {
      case TypeSpec::Kind::Scalar: return 0;
      case TypeSpec::Kind::SizedArray: return t.size;
      case TypeSpec::Kind::AliasArray: {
        auto it = alias_size_.find(t.alias);
        if (it == alias_size_.end())
          fail(ErrorKind::UnboundVariable, t.pos,
               "unknown type alias '" + t.alias + "'");
        return it->second;
      }
      case TypeSpec::Kind::UnsizedArray: return -1;
    }
    return 0;
  }

  std::pair<int, int> declare_shape(const std::string& name,
                                    const TypeSpec& type, SourcePos pos) {
    int size = type_size(type);
    if (size == 0) return {add_var(name, pos), 0};
    int first = -1;
    for (int i = 0; i < size; ++i) {
      int id = add_var(name + "[" + std::to_string(i) + "]", pos);
      if (i == 0) first = id;
    }
    return {first, size};
  }

  void collect_aliases() {
    for (const TypeAliasDecl& t : script_.type_aliases) {
      if (alias_size_.count(t.name))
        fail(ErrorKind::DuplicateName, t.pos,
             "duplicate type alias '" + t.name + "'");
      alias_size_[t.name] = t.hi - t.lo + 1;
    }
  }

  void declare_globals() {
    for (const GlobalDecl& g : script_.globals) {
      if (global_shape_.count(g.name))
        fail(ErrorKind::DuplicateName, g.pos,
             "duplicate global '" + g.name + "'");
      global_shape_[g.name] = declare_shape(g.name, g.type, g.pos);
    }
  }

  void collect_protocols() {
    for (const ProtocolDecl& p : script_.protocols) {
      if (protocols_.count(p.name))
        fail(ErrorKind::DuplicateName, p.pos,
             "duplicate protocol \"" + p.name + "\"");
      std::set<std::string> names;
      for (const FormalDecl& f : p.formals)
        if (!names.insert(f.name).second)
          fail(ErrorKind::DuplicateName, f.pos,
               "duplicate parameter '" + f.name + "'");
      for (const LocalDecl& l : p.locals)
        if (!names.insert(l.name).second)
          fail(ErrorKind::DuplicateName, l.pos,
               "duplicate local '" + l.name + "'");
      protocols_[p.name] = &p;
    }
  }

  // Resolves an actual argument to the ids it denotes.
  Binding resolve_actual(const NameRef& r) {
    if (!r.agent.empty())
      fail(ErrorKind::UnboundVariable, r.pos,
           "agent argument must be a global variable");
    auto it = global_shape_.find(r.name);
    if (it == global_shape_.end())
      fail(ErrorKind::UnboundVariable, r.pos,
           "unknown global '" + r.name + "'");
    auto [first, count] = it->second;
    Binding b;
    if (r.index) {
      if (count == 0)
        fail(ErrorKind::ArityMismatch, r.pos,
             "'" + r.name + "' is not an array");
      if (*r.index < 0 || *r.index >= count)
        fail(ErrorKind::UnboundVariable, r.pos,
             "index " + std::to_string(*r.index) + " out of bounds for '" +
                 r.name + "'");
      b.ids = {first + *r.index};
      return b;
    }
    if (count == 0) {
      b.ids = {first};
      return b;
    }
    b.is_array = true;
    for (int i = 0; i < count; ++i) b.ids.push_back(first + i);
    return b;
  }

  void bind_agents() {
    std::set<std::string> agent_names;
    for (const AgentDecl& a : script_.agents) {
      if (!agent_names.insert(a.name).second)
        fail(ErrorKind::DuplicateName, a.pos,
             "duplicate agent '" + a.name + "'");
      auto pit = protocols_.find(a.protocol);
      if (pit == protocols_.end())
        fail(ErrorKind::UnboundVariable, a.pos,
             "unknown protocol \"" + a.protocol + "\"");
      const ProtocolDecl& proto = *pit->second;
      if (a.args.size() != proto.formals.size())
        fail(ErrorKind::ArityMismatch, a.pos,
             "agent " + a.name + " passes " + std::to_string(a.args.size()) +
                 " arguments, protocol \"" + proto.name + "\" takes " +
                 std::to_string(proto.formals.size()));

      AgentInfo info;
      info.name = a.name;
      info.protocol = a.protocol;
      std::map<std::string, Binding> env;
      std::set<int> observable;

      for (size_t i = 0; i < a.args.size(); ++i) {
        const FormalDecl& formal = proto.formals[i];
        Binding b = resolve_actual(a.args[i]);
        int want = type_size(formal.type);
        if (want == 0 && b.is_array)
          fail(ErrorKind::ArityMismatch, a.args[i].pos,
               "parameter '" + formal.name + "' is a scalar, got an array");
        if (want != 0 && !b.is_array)
          fail(ErrorKind::ArityMismatch, a.args[i].pos,
               "parameter '" + formal.name + "' is an array, got a scalar");
        if (want > 0 && (int)b.ids.size() != want)
          fail(ErrorKind::ArityMismatch, a.args[i].pos,
               "parameter '" + formal.name + "' wants " +
                   std::to_string(want) + " elements, got " +
                   std::to_string(b.ids.size()));
        if (formal.observable) observable.insert(b.ids.begin(), b.ids.end());
        env[formal.name] = std::move(b);
      }

      std::map<std::string, std::pair<int, int>> locals;
      for (const LocalDecl& l : proto.locals) {
        int size = type_size(l.type);
        if (size < 0)
          fail(ErrorKind::ArityMismatch, l.pos,
               "local '" + l.name + "' needs a fixed size");
        auto shape = declare_shape(a.name + "." + l.name, l.type, l.pos);
        locals[l.name] = shape;
        Binding b;
        if (shape.second == 0) {
          b.ids = {shape.first};
        } else {
          b.is_array = true;
          for (int i = 0; i < shape.second; ++i)
            b.ids.push_back(shape.first + i);
        }
        if (l.observable) observable.insert(b.ids.begin(), b.ids.end());
        env[l.name] = std::move(b);
      }
      local_shape_.push_back(std::move(locals));

      for (const Action& act : proto.body) {
        CAction ca;
        if (!act.skip)
          for (const Stmt& st : act.code) ca.push_back(compile_stmt(st, env));
        info.actions.push_back(std::move(ca));
      }
      info.observable.assign(observable.begin(), observable.end());
      sys_.agents.push_back(std::move(info));
    }
  }

  int resolve_in_protocol(const NameRef& r,
                          const std::map<std::string, Binding>& env) {
    if (!r.agent.empty())
      fail(ErrorKind::UnboundVariable, r.pos,
           "qualified name '" + r.agent + "." + r.name +
               "' is not allowed in protocol code");
    auto it = env.find(r.name);
    if (it == env.end())
      fail(ErrorKind::UnboundVariable, r.pos,
           "unknown variable '" + r.name + "'");
    const Binding& b = it->second;
    if (r.index) {
      if (!b.is_array)
        fail(ErrorKind::ArityMismatch, r.pos,
             "'" + r.name + "' is not an array");
      if (*r.index < 0 || *r.index >= (int)b.ids.size())
        fail(ErrorKind::UnboundVariable, r.pos,
             "index " + std::to_string(*r.index) + " out of bounds for '" +
                 r.name + "'");
      return b.ids[*r.index];
    }
    if (b.is_array)
      fail(ErrorKind::ArityMismatch, r.pos,
           "array '" + r.name + "' needs an index here");
    return b.ids[0];
  }

  CExprPtr compile_expr_env(const ExprPtr& e,
                            const std::map<std::string, Binding>& env) {
    switch (e->kind) {
      case Expr::Kind::Const: return CExpr::constant(e->cval);
      case Expr::Kind::Var:
        return CExpr::variable(resolve_in_protocol(e->ref, env));
      case Expr::Kind::Unary:
        return CExpr::negate(compile_expr_env(e->lhs, env));
      case Expr::Kind::Binary:
        return CExpr::binary(e->op, compile_expr_env(e->lhs, env),
                             compile_expr_env(e->rhs, env));
    }
    return CExpr::constant(false);
  }

  CStmt compile_stmt(const Stmt& st, const std::map<std::string, Binding>& env) {
    CStmt c;
    c.target = resolve_in_protocol(st.target, env);
    if (st.kind == Stmt::Kind::Rand) {
      c.is_rand = true;
    } else {
      c.value = compile_expr_env(st.value, env);
    }
    return c;
  }

  // Resolves a global-scope reference; qualified names pick agent locals
  // when allow_locals is set.
  int resolve_global(const NameRef& r, bool allow_locals, ErrorKind on_local) {
    if (!r.agent.empty()) {
      int agent = -1;
      for (size_t i = 0; i < sys_.agents.size(); ++i)
        if (sys_.agents[i].name == r.agent) agent = (int)i;
      if (agent < 0)
        fail(ErrorKind::UnboundVariable, r.pos,
             "unknown agent '" + r.agent + "'");
      auto it = local_shape_[agent].find(r.name);
      if (it == local_shape_[agent].end())
        fail(ErrorKind::UnboundVariable, r.pos,
             "agent '" + r.agent + "' has no local '" + r.name + "'");
      if (!allow_locals)
        fail(on_local, r.pos,
             "'" + r.agent + "." + r.name +
                 "' is a protocol local and may not appear here");
      auto [first, count] = it->second;
      return element_of(r, first, count);
    }
    auto it = global_shape_.find(r.name);
    if (it == global_shape_.end())
      fail(ErrorKind::UnboundVariable, r.pos,
           "unknown global '" + r.name + "'");
    auto [first, count] = it->second;
    return element_of(r, first, count);
  }

  int element_of(const NameRef& r, int first, int count) {
    if (r.index) {
      if (count == 0)
        fail(ErrorKind::ArityMismatch, r.pos,
             "'" + r.name + "' is not an array");
      if (*r.index < 0 || *r.index >= count)
        fail(ErrorKind::UnboundVariable, r.pos,
             "index " + std::to_string(*r.index) + " out of bounds for '" +
                 r.name + "'");
      return first + *r.index;
    }
    if (count != 0)
      fail(ErrorKind::ArityMismatch, r.pos,
           "array '" + r.name + "' needs an index here");
    return first;
  }

  CExprPtr compile_expr_global(const ExprPtr& e, bool allow_locals,
                               ErrorKind on_local) {
    switch (e->kind) {
      case Expr::Kind::Const: return CExpr::constant(e->cval);
      case Expr::Kind::Var:
        return CExpr::variable(resolve_global(e->ref, allow_locals, on_local));
      case Expr::Kind::Unary:
        return CExpr::negate(
            compile_expr_global(e->lhs, allow_locals, on_local));
      case Expr::Kind::Binary:
        return CExpr::binary(
            e->op, compile_expr_global(e->lhs, allow_locals, on_local),
            compile_expr_global(e->rhs, allow_locals, on_local));
    }
    return CExpr::constant(false);
  }

  void compile_init() {
    if (!script_.init_cond) return;
    sys_.init = compile_expr_global(script_.init_cond, false,
                                    ErrorKind::LocalInInit);
    cexpr_vars(sys_.init, sys_.init_vars);
  }

  void compile_env() {
    for (const Stmt& st : script_.transitions) {
      CStmt c;
      c.target = resolve_global(st.target, true, ErrorKind::UnboundVariable);
      if (st.kind == Stmt::Kind::Rand) {
        c.is_rand = true;
      } else {
        c.value = compile_expr_global(st.value, true, ErrorKind::UnboundVariable);
      }
      sys_.env.push_back(std::move(c));
    }
  }

  void pad_actions() {
    int n = 0;
    for (const AgentInfo& a : sys_.agents)
      n = std::max(n, (int)a.actions.size());
    for (const SpecDecl& sp : script_.specs) n = std::max(n, sp.time);
    for (AgentInfo& a : sys_.agents) a.actions.resize(n);
    sys_.horizon = n;
  }

  CFormulaPtr compile_formula(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Const: return CFormula::constant(f->cval);
      case Formula::Kind::Atom:
        return CFormula::atom(
            resolve_global(f->ref, true, ErrorKind::UnboundVariable));
      case Formula::Kind::Unary:
        return CFormula::negate(compile_formula(f->lhs));
      case Formula::Kind::Binary:
        return CFormula::binary(f->op, compile_formula(f->lhs),
                                compile_formula(f->rhs));
      case Formula::Kind::Knows: {
        int agent = sys_.agent_id(f->agent);
        if (agent < 0)
          fail(ErrorKind::UnboundVariable, f->pos,
               "unknown agent '" + f->agent + "'");
        return CFormula::knows(agent, compile_formula(f->lhs));
      }
    }
    return CFormula::constant(false);
  }

  void compile_specs() {
    for (const SpecDecl& sp : script_.specs) {
      CheckedSpec cs;
      cs.keyword = sp.keyword;
      cs.label = sp.label;
      cs.time = sp.time;
      cs.source = sp.body;
      cs.body = compile_formula(sp.body);
      sys_.specs.push_back(std::move(cs));
    }
  }
};

}  // namespace

CheckedSystem check_script(const Script& s) { return Checker(s).run(); }

std::string timed_name(const CheckedSystem& sys, int var, int t) {
  return sys.var_names[var] + "@" + std::to_string(t);
}

}  // namespace epiveri
