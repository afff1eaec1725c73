#include "epiveri/pretty.hpp"

#include <sstream>

namespace epiveri {

namespace {

// Binding strength, loosest first; prefix operators are tightest.
int op_level(BoolOp op) {
  switch (op) {
    case BoolOp::Iff: return 0;
    case BoolOp::Implies: return 1;
    case BoolOp::Or: return 2;
    case BoolOp::And: return 3;
    case BoolOp::Xor: return 4;
    case BoolOp::Neg: return 5;
  }
  return 5;
}

const char* op_text(BoolOp op) {
  switch (op) {
    case BoolOp::Iff: return "<=>";
    case BoolOp::Implies: return "=>";
    case BoolOp::Or: return "\\/";
    case BoolOp::And: return "/\\";
    case BoolOp::Xor: return "xor";
    case BoolOp::Neg: return "neg";
  }
  return "?";
}

void print_expr(std::ostream& os, const ExprPtr& e, int parent_level) {
  int lv;
  switch (e->kind) {
    case Expr::Kind::Const:
      os << (e->cval ? "True" : "False");
      return;
    case Expr::Kind::Var:
      os << pretty_nameref(e->ref);
      return;
    case Expr::Kind::Unary:
      os << "neg ";
      print_expr(os, e->lhs, op_level(BoolOp::Neg));
      return;
    case Expr::Kind::Binary:
      lv = op_level(e->op);
      // => is right associative, the other binaries left associative; always
      // parenthesize when binding looser than the context requires.
      if (lv < parent_level) os << "(";
      print_expr(os, e->lhs, e->op == BoolOp::Implies ? lv + 1 : lv);
      os << " " << op_text(e->op) << " ";
      print_expr(os, e->rhs, e->op == BoolOp::Implies ? lv : lv + 1);
      if (lv < parent_level) os << ")";
      return;
  }
}

void print_formula(std::ostream& os, const FormulaPtr& f, int parent_level) {
  int lv;
  switch (f->kind) {
    case Formula::Kind::Const:
      os << (f->cval ? "True" : "False");
      return;
    case Formula::Kind::Atom:
      os << pretty_nameref(f->ref);
      return;
    case Formula::Kind::Unary:
      os << "neg ";
      print_formula(os, f->lhs, op_level(BoolOp::Neg));
      return;
    case Formula::Kind::Knows: {
      // Knows binds like a prefix operator; parenthesize any looser body.
      os << "Knows " << f->agent << " ";
      print_formula(os, f->lhs, op_level(BoolOp::Neg));
      return;
    }
    case Formula::Kind::Binary:
      lv = op_level(f->op);
      if (lv < parent_level) os << "(";
      print_formula(os, f->lhs, f->op == BoolOp::Implies ? lv + 1 : lv);
      os << " " << op_text(f->op) << " ";
      print_formula(os, f->rhs, f->op == BoolOp::Implies ? lv : lv + 1);
      if (lv < parent_level) os << ")";
      return;
  }
}

std::string type_text(const TypeSpec& t) {
  switch (t.kind) {
    case TypeSpec::Kind::Scalar: return "Bool";
    case TypeSpec::Kind::SizedArray:
      return "Bool[" + std::to_string(t.size) + "]";
    case TypeSpec::Kind::AliasArray: return "Bool[" + t.alias + "]";
    case TypeSpec::Kind::UnsizedArray: return "Bool[]";
  }
  return "Bool";
}

void print_stmt(std::ostream& os, const Stmt& st) {
  if (st.kind == Stmt::Kind::Rand) {
    os << "rand(" << pretty_nameref(st.target) << ")";
  } else {
    os << pretty_nameref(st.target) << " := " << pretty_expr(st.value);
  }
}

void print_formal(std::ostream& os, const FormalDecl& f) {
  os << f.name << " : ";
  if (f.observable) os << "observable ";
  os << type_text(f.type);
}

}  // namespace

std::string pretty_nameref(const NameRef& r) {
  std::string s;
  if (!r.agent.empty()) s += r.agent + ".";
  s += r.name;
  if (r.index) s += "[" + std::to_string(*r.index) + "]";
  return s;
}

std::string pretty_expr(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_formula(const FormulaPtr& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::string pretty_script(const Script& s) {
  std::ostringstream os;
  for (const auto& t : s.type_aliases)
    os << "type " << t.name << " = {" << t.lo << ".." << t.hi << "}\n";
  if (!s.type_aliases.empty()) os << "\n";
  for (const auto& g : s.globals)
    os << g.name << " : " << type_text(g.type) << "\n";
  if (!s.globals.empty()) os << "\n";
  if (s.init_cond) os << "init_cond = " << pretty_expr(s.init_cond) << "\n\n";
  for (const auto& a : s.agents) {
    os << "agent " << a.name << " \"" << a.protocol << "\" (";
    for (size_t i = 0; i < a.args.size(); ++i) {
      if (i) os << ", ";
      os << pretty_nameref(a.args[i]);
    }
    os << ")\n";
  }
  if (!s.agents.empty()) os << "\n";
  if (s.has_transitions) {
    os << "transitions\nbegin\n";
    for (size_t i = 0; i < s.transitions.size(); ++i) {
      os << "  ";
      print_stmt(os, s.transitions[i]);
      os << (i + 1 < s.transitions.size() ? ";" : "") << "\n";
    }
    os << "end\n\n";
  }
  for (const auto& sp : s.specs) {
    os << sp.keyword << " = ";
    if (sp.label) os << "\"" << *sp.label << "\" ";
    os << "X " << sp.time << " " << pretty_formula(sp.body) << "\n\n";
  }
  for (const auto& p : s.protocols) {
    os << "protocol \"" << p.name << "\"\n(\n";
    for (size_t i = 0; i < p.formals.size(); ++i) {
      os << "  ";
      print_formal(os, p.formals[i]);
      os << (i + 1 < p.formals.size() ? "," : "") << "\n";
    }
    os << ")\n";
    if (!p.locals.empty()) os << "\n";
    for (const auto& l : p.locals) {
      print_formal(os, l);
      os << "\n";
    }
    os << "\nbegin\n";
    for (size_t i = 0; i < p.body.size(); ++i) {
      const Action& a = p.body[i];
      if (a.skip) {
        os << "  skip";
      } else {
        os << "  <| ";
        for (size_t j = 0; j < a.code.size(); ++j) {
          if (j) os << "; ";
          print_stmt(os, a.code[j]);
        }
        os << " |>";
      }
      os << (i + 1 < p.body.size() ? ";" : "") << "\n";
    }
    os << "end\n\n";
  }
  return os.str();
}

}  // namespace epiveri
