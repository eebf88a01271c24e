#pragma once

#include "screener/rules/ast.hpp"

#include <string>

namespace screener::rules {

// Canonical brace-form source. Re-parsing the output yields a structurally
// equal program; distinct programs print to distinct text.
std::string pretty_print(const RuleProgram& program);

std::string expr_to_string(const RuleProgram& program, ExprId id);

// One-line rendering of a statement head: `if member["age"] < 18`,
// `return true`, `let eligible = false`, `for member in household`.
std::string node_line(const RuleProgram& program, NodeId id);

}  // namespace screener::rules
