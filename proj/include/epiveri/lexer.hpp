#pragma once

#include <string>
#include <vector>

#include "epiveri/diag.hpp"

namespace epiveri {

enum class Tok {
  Ident,
  Int,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Semi,
  Comma,
  Colon,
  Assign,   // :=
  Equals,   // =
  Dot,
  DotDot,
  And,      // the "/\" operator
  Or,       // the "\/" operator
  Implies,  // =>
  Iff,      // <=>
  OpenAtom,   // <|
  CloseAtom,  // |>
  End,        // end of input
};

struct Token {
  Tok kind;
  std::string text;  // identifier text, digits, or string contents
  int value = 0;     // Tok::Int
  SourcePos pos;
};

// Tokenizes a script. "--" starts a comment running to end of line.
// Throws ScriptError(SyntaxError) on unrecognized input.
std::vector<Token> lex_script(const std::string& text,
                              const std::string& filename);

// Token-stream equality ignoring whitespace and comments; used to compare
// generated benchmark scripts against reference listings.
bool same_token_stream(const std::string& a, const std::string& b);

}  // namespace epiveri
