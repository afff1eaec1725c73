#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "epiveri/ast.hpp"

namespace epiveri {

// Name-resolved forms. The checker flattens arrays to individual boolean
// variables, renames protocol locals to "Agent.name", substitutes formal
// parameters by the bound globals, and pads every agent's action sequence
// with skip to the common horizon.

// Expression over flat variable ids. eval_lanes runs 64 states at once,
// one per bit (an all-ones word is true in every lane); the explicit-state
// interpreter and the oracle both build on it.
struct CExpr;
using CExprPtr = std::shared_ptr<const CExpr>;

struct CExpr {
  enum class Kind { Const, Var, Not, Bin } kind = Kind::Const;
  bool cval = false;
  int var = -1;
  BoolOp op = BoolOp::And;
  CExprPtr lhs, rhs;

  static CExprPtr constant(bool v);
  static CExprPtr variable(int var);
  static CExprPtr negate(CExprPtr x);
  static CExprPtr binary(BoolOp op, CExprPtr l, CExprPtr r);

  bool eval_bool(const uint8_t* state) const;
  uint64_t eval_lanes(const uint64_t* state) const;
};

// Collects the variable ids used by e into out (deduplicated, sorted).
void cexpr_vars(const CExprPtr& e, std::vector<int>& out);

struct CStmt {
  bool is_rand = false;
  int target = -1;
  CExprPtr value;  // null for rand
};

// One protocol step: the statements of an atomic block, empty for skip.
using CAction = std::vector<CStmt>;

// Query over flat variable ids; Knows carries the agent index.
struct CFormula;
using CFormulaPtr = std::shared_ptr<const CFormula>;

struct CFormula {
  enum class Kind { Const, Atom, Not, Bin, Knows } kind = Kind::Const;
  bool cval = false;
  int var = -1;
  BoolOp op = BoolOp::And;
  int agent = -1;
  CFormulaPtr lhs, rhs;

  static CFormulaPtr constant(bool v);
  static CFormulaPtr atom(int var);
  static CFormulaPtr negate(CFormulaPtr x);
  static CFormulaPtr binary(BoolOp op, CFormulaPtr l, CFormulaPtr r);
  static CFormulaPtr knows(int agent, CFormulaPtr x);
};

// Atom variable ids of f (sorted, deduplicated).
std::vector<int> cformula_atoms(const CFormulaPtr& f);
// Agent indices under some Knows in f (sorted, deduplicated).
std::vector<int> cformula_agents(const CFormulaPtr& f);
// Maximum nesting depth of Knows operators.
int cformula_k_depth(const CFormulaPtr& f);

struct CheckedSpec {
  std::string keyword;
  std::optional<std::string> label;
  int time = 0;
  CFormulaPtr body;
  FormulaPtr source;
};

struct AgentInfo {
  std::string name;
  std::string protocol;
  std::vector<CAction> actions;  // length = horizon
  std::vector<int> observable;   // sorted variable ids (the set Q_i)
};

struct CheckedSystem {
  std::string filename;
  std::vector<std::string> var_names;
  std::unordered_map<std::string, int> var_index;
  CExprPtr init;               // null when the script has no init_cond
  std::vector<int> init_vars;  // sorted ids occurring in init
  std::vector<AgentInfo> agents;
  std::vector<CStmt> env;  // transition statements, run at the end of a tick
  int horizon = 0;
  std::vector<CheckedSpec> specs;

  int num_vars() const { return (int)var_names.size(); }
  int agent_id(const std::string& name) const;
  // Statements executed by tick t: each agent's action t in declared order,
  // then the environment transitions.
  std::vector<CStmt> tick_statements(int t) const;
};

CheckedSystem check_script(const Script& s);

// Timed name "v@t" for variable id v of the system.
std::string timed_name(const CheckedSystem& sys, int var, int t);

// The timed variables (id, time) mentioned by a spec body whose atoms all
// sit at the spec's time prefix k. Sorted, deduplicated.
std::vector<std::pair<int, int>> formula_vars(const CFormulaPtr& f, int k);

// Finds the spec selected by --spec: exact label match first, then unique
// substring match; null label selects the first spec. Returns its index.
int select_spec(const CheckedSystem& sys, const std::optional<std::string>& label);

}  // namespace epiveri
