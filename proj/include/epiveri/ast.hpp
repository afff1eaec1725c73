#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epiveri/diag.hpp"

namespace epiveri {

// Syntax tree for protocol scripts. This layer is purely syntactic; name
// resolution, flattening of arrays and observability bookkeeping happen in
// the checker.

enum class BoolOp { Neg, And, Or, Xor, Implies, Iff };

// A variable reference as written: optional agent qualifier ("C0.rcvd1"),
// base name, optional constant index ("paid[2]").
struct NameRef {
  std::string agent;
  std::string name;
  std::optional<int> index;
  SourcePos pos;

  bool operator==(const NameRef& o) const {
    return agent == o.agent && name == o.name && index == o.index;
  }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Unary, Binary } kind;
  bool cval = false;           // Kind::Const
  NameRef ref;                 // Kind::Var
  BoolOp op = BoolOp::Neg;     // Unary (Neg) or Binary
  ExprPtr lhs, rhs;            // Unary uses lhs only
  SourcePos pos;

  static ExprPtr constant(bool v, SourcePos p = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Const;
    e->cval = v;
    e->pos = p;
    return e;
  }
  static ExprPtr var(NameRef r) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->pos = r.pos;
    e->ref = std::move(r);
    return e;
  }
  static ExprPtr unary(BoolOp o, ExprPtr x, SourcePos p = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Unary;
    e->op = o;
    e->lhs = std::move(x);
    e->pos = p;
    return e;
  }
  static ExprPtr binary(BoolOp o, ExprPtr l, ExprPtr r, SourcePos p = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->op = o;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    e->pos = p;
    return e;
  }
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

struct Stmt {
  enum class Kind { Assign, Rand } kind = Kind::Assign;
  NameRef target;
  ExprPtr value;  // Assign only
  SourcePos pos;
};

// One straight-line code block: statements executed in order.
using CodeBlock = std::vector<Stmt>;

// One step of a protocol: either an atomic block <| ... |> or skip.
struct Action {
  bool skip = false;
  CodeBlock code;
  SourcePos pos;
};

// Epistemic query body (no temporal operators; the single time prefix is
// stored on the Spec).
struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Const, Atom, Unary, Binary, Knows } kind;
  bool cval = false;
  NameRef ref;              // Atom
  BoolOp op = BoolOp::Neg;  // Unary/Binary
  std::string agent;        // Knows
  FormulaPtr lhs, rhs;
  SourcePos pos;

  static FormulaPtr constant(bool v, SourcePos p = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Const;
    f->cval = v;
    f->pos = p;
    return f;
  }
  static FormulaPtr atom(NameRef r) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Atom;
    f->pos = r.pos;
    f->ref = std::move(r);
    return f;
  }
  static FormulaPtr unary(BoolOp o, FormulaPtr x, SourcePos p = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Unary;
    f->op = o;
    f->lhs = std::move(x);
    f->pos = p;
    return f;
  }
  static FormulaPtr binary(BoolOp o, FormulaPtr l, FormulaPtr r,
                           SourcePos p = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Binary;
    f->op = o;
    f->lhs = std::move(l);
    f->rhs = std::move(r);
    f->pos = p;
    return f;
  }
  static FormulaPtr knows(std::string agent, FormulaPtr x, SourcePos p = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Knows;
    f->agent = std::move(agent);
    f->lhs = std::move(x);
    f->pos = p;
    return f;
  }
};

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

// Variable type as declared. Array sizes may be given numerically, via a
// range-type alias, or omitted (unsized formal arrays, sized at binding).
struct TypeSpec {
  enum class Kind { Scalar, SizedArray, AliasArray, UnsizedArray } kind =
      Kind::Scalar;
  int size = 0;            // SizedArray
  std::string alias;       // AliasArray
  SourcePos pos;
};

struct TypeAliasDecl {
  std::string name;
  int lo = 0;
  int hi = 0;  // inclusive; array size is hi - lo + 1
  SourcePos pos;
};

struct GlobalDecl {
  std::string name;
  TypeSpec type;
  SourcePos pos;
};

struct FormalDecl {
  std::string name;
  bool observable = false;
  TypeSpec type;
  SourcePos pos;
};

using LocalDecl = FormalDecl;

// Actual argument in an agent declaration: a global, or one element of it.
using ActualArg = NameRef;

struct AgentDecl {
  std::string name;
  std::string protocol;
  std::vector<ActualArg> args;
  SourcePos pos;
};

struct SpecDecl {
  std::string keyword;  // full keyword as written, e.g. "spec_spr_ci"
  std::optional<std::string> label;
  int time = 0;  // the k of the top-level X k prefix
  FormulaPtr body;
  SourcePos pos;
};

struct ProtocolDecl {
  std::string name;
  std::vector<FormalDecl> formals;
  std::vector<LocalDecl> locals;
  std::vector<Action> body;
  SourcePos pos;
};

struct Script {
  std::string filename;
  std::vector<TypeAliasDecl> type_aliases;
  std::vector<GlobalDecl> globals;
  ExprPtr init_cond;  // null when the script has no init_cond clause
  std::vector<AgentDecl> agents;
  CodeBlock transitions;  // empty when absent
  bool has_transitions = false;
  std::vector<SpecDecl> specs;
  std::vector<ProtocolDecl> protocols;
};

}  // namespace epiveri
