#pragma once

#include "screener/error.hpp"
#include "screener/features/store.hpp"
#include "screener/rules/ast.hpp"

#include <compare>
#include <set>
#include <variant>
#include <vector>

namespace screener::rules {

// One execution of a node; `iteration` is the member index for nodes inside
// a member loop and -1 elsewhere.
struct Visit {
    NodeId node = 0;
    int iteration = -1;
    auto operator<=>(const Visit&) const = default;
};

// Executed nodes of one evaluation. `executed` is the set of unique node ids
// (the coverage unit). `visits` keeps the per-iteration breakdown so that two
// runs of a loop with different member outcomes stay distinguishable.
struct Trace {
    std::set<NodeId> executed;
    std::set<Visit> visits;

    bool operator==(const Trace&) const = default;
};

struct Decision {
    bool eligible = false;
    Trace trace;
    std::vector<KeyPath> reads;  // distinct keys, first-read order
};

// First absent feature in execution order.
struct Missing {
    KeyPath key;
    NodeId node = 0;
};

using EvalOutcome = std::variant<Decision, Missing>;

// A stored value that cannot take part in an operation (arithmetic on a
// choice, ordering strings, division by zero, non-boolean condition). Always
// a checker or schema bug, never a user error.
class TypeFault : public Error {
public:
    TypeFault(const std::string& what, NodeId node)
        : Error(what + " (node " + std::to_string(node) + ")"), node(node) {}
    NodeId node;
};

// Runs the checker against the store. Pure: the store is not modified.
// Throws TypeFault, or features::UndefinedSlot for keys the schema lacks.
EvalOutcome evaluate(const RuleProgram& program, const features::FeatureStore& store);

}  // namespace screener::rules
