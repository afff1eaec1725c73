#include "epiveri/parser.hpp"

#include <set>

#include "epiveri/lexer.hpp"

namespace epiveri {

namespace {

const std::set<std::string> kReserved = {
    "type", "init_cond", "agent",  "transitions", "protocol", "begin",
    "end",  "skip",      "rand",   "observable",  "Bool",     "True",
    "False", "neg",      "xor",    "Knows",       "X",
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string filename)
      : toks_(std::move(toks)), file_(std::move(filename)) {}

  Script parse() {
    Script s;
    s.filename = file_;
    while (!at(Tok::End)) {
      if (at_word("type")) {
        s.type_aliases.push_back(parse_type_alias());
      } else if (at_word("init_cond")) {
        if (s.init_cond)
          fail(peek().pos, "init_cond given more than once");
        eat_word("init_cond");
        expect(Tok::Equals, "'='");
        s.init_cond = parse_expr_toplevel();
      } else if (at_word("agent")) {
        s.agents.push_back(parse_agent());
      } else if (at_word("transitions")) {
        if (s.has_transitions)
          fail(peek().pos, "transitions given more than once");
        eat_word("transitions");
        expect_word("begin");
        s.transitions = parse_code_block("end");
        expect_word("end");
        s.has_transitions = true;
      } else if (at(Tok::Ident) && peek().text.rfind("spec_spr", 0) == 0) {
        s.specs.push_back(parse_spec());
      } else if (at_word("protocol")) {
        s.protocols.push_back(parse_protocol());
      } else if (at(Tok::Ident) && at(Tok::Colon, 1)) {
        s.globals.push_back(parse_global());
      } else {
        fail(peek().pos, "expected a declaration, got '" + describe(peek()) +
                             "'");
      }
    }
    return s;
  }

  ExprPtr parse_expr_only() {
    ExprPtr e = parse_expr_toplevel();
    expect(Tok::End, "end of input");
    return e;
  }

  FormulaPtr parse_formula_only() {
    FormulaPtr f = parse_formula_level(0);
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k, size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool at_word(const std::string& w, size_t ahead = 0) const {
    return at(Tok::Ident, ahead) && peek(ahead).text == w;
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(SourcePos p, const std::string& msg) const {
    throw ScriptError(ErrorKind::SyntaxError, file_, p, msg);
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Ident: return t.text;
      case Tok::Int: return t.text;
      case Tok::String: return "\"" + t.text + "\"";
      case Tok::End: return "end of input";
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::LBracket: return "[";
      case Tok::RBracket: return "]";
      case Tok::LBrace: return "{";
      case Tok::RBrace: return "}";
      case Tok::Semi: return ";";
      case Tok::Comma: return ",";
      case Tok::Colon: return ":";
      case Tok::Assign: return ":=";
      case Tok::Equals: return "=";
      case Tok::Dot: return ".";
      case Tok::DotDot: return "..";
      case Tok::And: return "/\\";
      case Tok::Or: return "\\/";
      case Tok::Implies: return "=>";
      case Tok::Iff: return "<=>";
      case Tok::OpenAtom: return "<|";
      case Tok::CloseAtom: return "|>";
    }
    return "?";
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail(peek().pos, "expected " + what + ", got '" +
                                     describe(peek()) + "'");
    return next();
  }
  void expect_word(const std::string& w) {
    if (!at_word(w))
      fail(peek().pos, "expected '" + w + "', got '" + describe(peek()) + "'");
    next();
  }
  void eat_word(const std::string& w) { expect_word(w); }

  std::string expect_name(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    if (kReserved.count(t.text))
      fail(t.pos, "'" + t.text + "' is a reserved word");
    return t.text;
  }

  TypeAliasDecl parse_type_alias() {
    TypeAliasDecl d;
    d.pos = peek().pos;
    eat_word("type");
    d.name = expect_name("type name");
    expect(Tok::Equals, "'='");
    expect(Tok::LBrace, "'{'");
    d.lo = expect(Tok::Int, "integer").value;
    expect(Tok::DotDot, "'..'");
    d.hi = expect(Tok::Int, "integer").value;
    expect(Tok::RBrace, "'}'");
    if (d.hi < d.lo) fail(d.pos, "empty range in type " + d.name);
    return d;
  }

  TypeSpec parse_type() {
    TypeSpec t;
    t.pos = peek().pos;
    expect_word("Bool");
    if (at(Tok::LBracket)) {
      next();
      if (at(Tok::RBracket)) {
        t.kind = TypeSpec::Kind::UnsizedArray;
      } else if (at(Tok::Int)) {
        t.kind = TypeSpec::Kind::SizedArray;
        t.size = next().value;
        if (t.size <= 0) fail(t.pos, "array size must be positive");
      } else if (at(Tok::Ident)) {
        t.kind = TypeSpec::Kind::AliasArray;
        t.alias = next().text;
      } else {
        fail(peek().pos, "expected array size");
      }
      expect(Tok::RBracket, "']'");
    }
    return t;
  }

  GlobalDecl parse_global() {
    GlobalDecl g;
    g.pos = peek().pos;
    Token t = expect(Tok::Ident, "variable name");
    if (kReserved.count(t.text))
      fail(t.pos, "'" + t.text + "' is a reserved word");
    g.name = t.text;
    expect(Tok::Colon, "':'");
    g.type = parse_type();
    if (g.type.kind == TypeSpec::Kind::UnsizedArray)
      fail(g.pos, "global arrays must have a size");
    return g;
  }

  AgentDecl parse_agent() {
    AgentDecl a;
    a.pos = peek().pos;
    eat_word("agent");
    a.name = expect_name("agent name");
    a.protocol = expect(Tok::String, "protocol name string").text;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      for (;;) {
        a.args.push_back(parse_nameref(false));
        if (!at(Tok::Comma)) break;
        next();
      }
    }
    expect(Tok::RParen, "')'");
    return a;
  }

  SpecDecl parse_spec() {
    SpecDecl d;
    d.pos = peek().pos;
    d.keyword = next().text;
    expect(Tok::Equals, "'='");
    if (at(Tok::String)) d.label = next().text;
    if (!at_word("X"))
      fail(peek().pos, "specification must start with a time prefix 'X k'");
    next();
    d.time = expect(Tok::Int, "time bound").value;
    d.body = parse_formula_level(0);
    return d;
  }

  ProtocolDecl parse_protocol() {
    ProtocolDecl p;
    p.pos = peek().pos;
    eat_word("protocol");
    p.name = expect(Tok::String, "protocol name string").text;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      for (;;) {
        p.formals.push_back(parse_formal());
        if (!at(Tok::Comma)) break;
        next();
      }
    }
    expect(Tok::RParen, "')'");
    while (!at_word("begin")) {
      if (at(Tok::End)) fail(peek().pos, "expected 'begin'");
      p.locals.push_back(parse_formal());
    }
    expect_word("begin");
    for (;;) {
      p.body.push_back(parse_action());
      if (!at(Tok::Semi)) break;
      next();
    }
    expect_word("end");
    return p;
  }

  FormalDecl parse_formal() {
    FormalDecl f;
    f.pos = peek().pos;
    f.name = expect_name("parameter name");
    expect(Tok::Colon, "':'");
    if (at_word("observable")) {
      next();
      f.observable = true;
    }
    f.type = parse_type();
    return f;
  }

  Action parse_action() {
    Action a;
    a.pos = peek().pos;
    if (at_word("skip")) {
      next();
      a.skip = true;
      return a;
    }
    expect(Tok::OpenAtom, "'<|' or 'skip'");
    for (;;) {
      a.code.push_back(parse_stmt());
      if (!at(Tok::Semi)) break;
      next();
    }
    expect(Tok::CloseAtom, "'|>'");
    return a;
  }

  CodeBlock parse_code_block(const std::string& terminator) {
    CodeBlock code;
    if (at_word(terminator)) return code;
    for (;;) {
      code.push_back(parse_stmt());
      if (!at(Tok::Semi)) break;
      next();
    }
    return code;
  }

  Stmt parse_stmt() {
    Stmt s;
    s.pos = peek().pos;
    if (at_word("rand")) {
      next();
      s.kind = Stmt::Kind::Rand;
      expect(Tok::LParen, "'('");
      s.target = parse_nameref(false);
      expect(Tok::RParen, "')'");
      return s;
    }
    s.kind = Stmt::Kind::Assign;
    s.target = parse_nameref(false);
    expect(Tok::Assign, "':='");
    s.value = parse_expr_toplevel();
    return s;
  }

  // allow_qualified admits "Agent.var" references (queries and, for error
  // reporting, init_cond; the checker rejects them where they are illegal).
  NameRef parse_nameref(bool formula_context) {
    NameRef r;
    Token t = expect(Tok::Ident, "variable name");
    if (kReserved.count(t.text))
      fail(t.pos, "'" + t.text + "' is a reserved word");
    r.pos = t.pos;
    r.name = t.text;
    if (at(Tok::Dot)) {
      next();
      Token m = expect(Tok::Ident, "variable name");
      if (kReserved.count(m.text))
        fail(m.pos, "'" + m.text + "' is a reserved word");
      r.agent = r.name;
      r.name = m.text;
    }
    if (at(Tok::LBracket)) {
      next();
      r.index = expect(Tok::Int, "constant index").value;
      expect(Tok::RBracket, "']'");
    }
    (void)formula_context;
    return r;
  }

  // Shared precedence climbing for expressions and formulas. Levels, loosest
  // to tightest: <=>, => (right associative), \/, /\, xor, prefix.
  ExprPtr parse_expr_toplevel() { return parse_expr_level(0); }

  ExprPtr parse_expr_level(int level) {
    switch (level) {
      case 0: {  // <=>
        ExprPtr e = parse_expr_level(1);
        while (at(Tok::Iff)) {
          SourcePos p = next().pos;
          e = Expr::binary(BoolOp::Iff, e, parse_expr_level(1), p);
        }
        return e;
      }
      case 1: {  // => right assoc
        ExprPtr e = parse_expr_level(2);
        if (at(Tok::Implies)) {
          SourcePos p = next().pos;
          return Expr::binary(BoolOp::Implies, e, parse_expr_level(1), p);
        }
        return e;
      }
      case 2: {  // disjunction
        ExprPtr e = parse_expr_level(3);
        while (at(Tok::Or)) {
          SourcePos p = next().pos;
          e = Expr::binary(BoolOp::Or, e, parse_expr_level(3), p);
        }
        return e;
      }
      case 3: {  // conjunction
        ExprPtr e = parse_expr_level(4);
        while (at(Tok::And)) {
          SourcePos p = next().pos;
          e = Expr::binary(BoolOp::And, e, parse_expr_level(4), p);
        }
        return e;
      }
      case 4: {  // xor
        ExprPtr e = parse_expr_prefix();
        while (at_word("xor")) {
          SourcePos p = next().pos;
          e = Expr::binary(BoolOp::Xor, e, parse_expr_prefix(), p);
        }
        return e;
      }
      default:
        return parse_expr_prefix();
    }
  }

  ExprPtr parse_expr_prefix() {
    if (at_word("neg")) {
      SourcePos p = next().pos;
      return Expr::unary(BoolOp::Neg, parse_expr_prefix(), p);
    }
    if (at_word("True")) return Expr::constant(true, next().pos);
    if (at_word("False")) return Expr::constant(false, next().pos);
    if (at(Tok::LParen)) {
      next();
      ExprPtr e = parse_expr_level(0);
      expect(Tok::RParen, "')'");
      return e;
    }
    return Expr::var(parse_nameref(false));
  }

  FormulaPtr parse_formula_level(int level) {
    switch (level) {
      case 0: {
        FormulaPtr f = parse_formula_level(1);
        while (at(Tok::Iff)) {
          SourcePos p = next().pos;
          f = Formula::binary(BoolOp::Iff, f, parse_formula_level(1), p);
        }
        return f;
      }
      case 1: {
        FormulaPtr f = parse_formula_level(2);
        if (at(Tok::Implies)) {
          SourcePos p = next().pos;
          return Formula::binary(BoolOp::Implies, f, parse_formula_level(1),
                                 p);
        }
        return f;
      }
      case 2: {
        FormulaPtr f = parse_formula_level(3);
        while (at(Tok::Or)) {
          SourcePos p = next().pos;
          f = Formula::binary(BoolOp::Or, f, parse_formula_level(3), p);
        }
        return f;
      }
      case 3: {
        FormulaPtr f = parse_formula_level(4);
        while (at(Tok::And)) {
          SourcePos p = next().pos;
          f = Formula::binary(BoolOp::And, f, parse_formula_level(4), p);
        }
        return f;
      }
      case 4: {
        FormulaPtr f = parse_formula_prefix();
        while (at_word("xor")) {
          SourcePos p = next().pos;
          f = Formula::binary(BoolOp::Xor, f, parse_formula_prefix(), p);
        }
        return f;
      }
      default:
        return parse_formula_prefix();
    }
  }

  FormulaPtr parse_formula_prefix() {
    if (at_word("neg")) {
      SourcePos p = next().pos;
      return Formula::unary(BoolOp::Neg, parse_formula_prefix(), p);
    }
    if (at_word("Knows")) {
      SourcePos p = next().pos;
      std::string agent = expect_name("agent name");
      return Formula::knows(agent, parse_formula_prefix(), p);
    }
    if (at_word("X"))
      fail(peek().pos,
           "temporal prefix is only allowed at the top of a specification");
    if (at_word("True")) return Formula::constant(true, next().pos);
    if (at_word("False")) return Formula::constant(false, next().pos);
    if (at(Tok::LParen)) {
      next();
      FormulaPtr f = parse_formula_level(0);
      expect(Tok::RParen, "')'");
      return f;
    }
    return Formula::atom(parse_nameref(true));
  }
};

}  // namespace

Script parse_script(const std::string& text, const std::string& filename) {
  return Parser(lex_script(text, filename), filename).parse();
}

FormulaPtr parse_formula(const std::string& text) {
  return Parser(lex_script(text, "<formula>"), "<formula>")
      .parse_formula_only();
}

ExprPtr parse_expr(const std::string& text) {
  return Parser(lex_script(text, "<expr>"), "<expr>").parse_expr_only();
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Const: return a->cval == b->cval;
    case Expr::Kind::Var: return a->ref == b->ref;
    case Expr::Kind::Unary:
      return a->op == b->op && expr_equal(a->lhs, b->lhs);
    case Expr::Kind::Binary:
      return a->op == b->op && expr_equal(a->lhs, b->lhs) &&
             expr_equal(a->rhs, b->rhs);
  }
  return false;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Const: return a->cval == b->cval;
    case Formula::Kind::Atom: return a->ref == b->ref;
    case Formula::Kind::Unary:
      return a->op == b->op && formula_equal(a->lhs, b->lhs);
    case Formula::Kind::Binary:
      return a->op == b->op && formula_equal(a->lhs, b->lhs) &&
             formula_equal(a->rhs, b->rhs);
    case Formula::Kind::Knows:
      return a->agent == b->agent && formula_equal(a->lhs, b->lhs);
  }
  return false;
}

}  // namespace epiveri
