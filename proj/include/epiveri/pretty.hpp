#pragma once

#include <string>

#include "epiveri/ast.hpp"

namespace epiveri {

// Canonical text forms. Parsing the result of pretty_script yields a tree
// equal to the input (round-trip identity up to positions).
std::string pretty_script(const Script& s);
std::string pretty_expr(const ExprPtr& e);
std::string pretty_formula(const FormulaPtr& f);
std::string pretty_nameref(const NameRef& r);

}  // namespace epiveri
