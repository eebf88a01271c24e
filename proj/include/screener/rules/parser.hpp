#pragma once

#include "screener/error.hpp"
#include "screener/rules/ast.hpp"

#include <string>
#include <string_view>

namespace screener::rules {

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line(line), column(column) {}
    int line;
    int column;
};

class SyntaxError : public ParseError {
public:
    using ParseError::ParseError;
};

// Boolean connectives, try/except, default-value lookups, dynamic keys.
class ForbiddenConstruct : public ParseError {
public:
    using ParseError::ParseError;
};

// Some execution path falls off the end without returning.
class MissingReturn : public ParseError {
public:
    using ParseError::ParseError;
};

// Parses checker source. Two surface forms are accepted and produce the same
// tree: the canonical brace form
//
//     for member in household {
//         if member["age"] < 18 { return true }
//     }
//     return false
//
// and an indentation form close to the Python a code model tends to emit
// (`if ...:` blocks, `elif`, `True`/`False`, `hh["k"]` and `hh[i]["k"]`,
// bare `x = ...` assignments, an optional `def f(hh):` wrapper).
//
// Pure and deterministic. Throws SyntaxError, ForbiddenConstruct or
// MissingReturn.
RuleProgram parse_program(std::string_view source, const std::string& opportunity_id);

}  // namespace screener::rules
