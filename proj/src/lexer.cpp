#include "epiveri/lexer.hpp"

#include <cctype>

namespace epiveri {

namespace {

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

}  // namespace

std::vector<Token> lex_script(const std::string& text,
                              const std::string& filename) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  const size_t n = text.size();

  auto here = [&]() { return SourcePos{line, col}; };
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < n; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto fail = [&](const std::string& msg) -> void {
    throw ScriptError(ErrorKind::SyntaxError, filename, here(), msg);
  };
  auto push = [&](Tok k, SourcePos p, std::string t = "", int v = 0) {
    out.push_back(Token{k, std::move(t), v, p});
  };

  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < n && text[i + 1] == '-') {
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos = here();
    if (ident_start(c)) {
      size_t j = i;
      while (j < n && ident_char(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      advance(j - i);
      push(Tok::Ident, pos, word);
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < n && std::isdigit((unsigned char)text[j])) ++j;
      std::string digits = text.substr(i, j - i);
      advance(j - i);
      push(Tok::Int, pos, digits, std::stoi(digits));
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < n && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= n || text[j] != '"') fail("unterminated string literal");
      std::string contents = text.substr(i + 1, j - i - 1);
      advance(j - i + 1);
      push(Tok::String, pos, contents);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < n && text[i + 1] == b;
    };
    if (two('/', '\\')) { advance(2); push(Tok::And, pos); continue; }
    if (two('\\', '/')) { advance(2); push(Tok::Or, pos); continue; }
    if (two(':', '=')) { advance(2); push(Tok::Assign, pos); continue; }
    if (two('=', '>')) { advance(2); push(Tok::Implies, pos); continue; }
    if (c == '<' && i + 2 < n && text[i + 1] == '=' && text[i + 2] == '>') {
      advance(3);
      push(Tok::Iff, pos);
      continue;
    }
    if (two('<', '|')) { advance(2); push(Tok::OpenAtom, pos); continue; }
    if (two('|', '>')) { advance(2); push(Tok::CloseAtom, pos); continue; }
    if (two('.', '.')) { advance(2); push(Tok::DotDot, pos); continue; }
    switch (c) {
      case '(': advance(1); push(Tok::LParen, pos); continue;
      case ')': advance(1); push(Tok::RParen, pos); continue;
      case '[': advance(1); push(Tok::LBracket, pos); continue;
      case ']': advance(1); push(Tok::RBracket, pos); continue;
      case '{': advance(1); push(Tok::LBrace, pos); continue;
      case '}': advance(1); push(Tok::RBrace, pos); continue;
      case ';': advance(1); push(Tok::Semi, pos); continue;
      case ',': advance(1); push(Tok::Comma, pos); continue;
      case ':': advance(1); push(Tok::Colon, pos); continue;
      case '=': advance(1); push(Tok::Equals, pos); continue;
      case '.': advance(1); push(Tok::Dot, pos); continue;
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
  }
  push(Tok::End, here());
  return out;
}

bool same_token_stream(const std::string& a, const std::string& b) {
  auto ta = lex_script(a, "<a>");
  auto tb = lex_script(b, "<b>");
  if (ta.size() != tb.size()) return false;
  for (size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].kind != tb[i].kind || ta[i].text != tb[i].text) return false;
  }
  return true;
}

}  // namespace epiveri
