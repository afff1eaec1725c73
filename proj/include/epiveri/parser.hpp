#pragma once

#include <string>

#include "epiveri/ast.hpp"

namespace epiveri {

// Parses a script source into a syntax tree. Throws
// ScriptError(SyntaxError) with a file:line:col diagnostic on bad input.
Script parse_script(const std::string& text, const std::string& filename);

// Parses a stand-alone query body (no X prefix); used by tests.
FormulaPtr parse_formula(const std::string& text);

// Parses a stand-alone boolean expression; used by tests.
ExprPtr parse_expr(const std::string& text);

}  // namespace epiveri
