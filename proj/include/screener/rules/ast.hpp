#pragma once

#include "screener/key_path.hpp"

#include <string>
#include <variant>
#include <vector>

namespace screener::rules {

using NodeId = int;
using ExprId = int;

// ── Expressions ─────────────────────────────────────────────────────────────
// Expressions live in an arena on the program and are not trace nodes; each
// statement is one node, so an `if` carries exactly one atomic condition.

struct Literal {
    std::variant<bool, double, std::string> value;
    bool integral = false;  // numeric literal written without a fraction

    bool operator==(const Literal&) const = default;
};

struct VariableRef {
    std::string name;
    bool operator==(const VariableRef&) const = default;
};

enum class LookupTarget {
    Household,      // household["k"]
    LoopMember,     // member["k"] inside `for member in household`
    IndexedMember,  // members[i]["k"]
};

struct FeatureLookup {
    LookupTarget target = LookupTarget::Household;
    int index = -1;  // IndexedMember only
    std::string key;
    bool operator==(const FeatureLookup&) const = default;
};

struct Negate {
    ExprId operand = -1;
    bool operator==(const Negate&) const = default;
};

enum class BinaryOp { Add, Sub, Mul, Div, Lt, Le, Eq, Ne, Ge, Gt };

const char* symbol(BinaryOp op);
bool is_comparison(BinaryOp op);

struct Binary {
    BinaryOp op = BinaryOp::Add;
    ExprId lhs = -1;
    ExprId rhs = -1;
    bool operator==(const Binary&) const = default;
};

using Expr = std::variant<Literal, VariableRef, FeatureLookup, Negate, Binary>;

// ── Statements (trace nodes) ────────────────────────────────────────────────

enum class NodeKind { Conditional, Return, MemberLoop, Assignment };

const char* to_string(NodeKind kind);

struct Conditional {
    ExprId condition = -1;
    std::vector<NodeId> then_block;
    std::vector<NodeId> else_block;  // may be empty
};

struct Return {
    ExprId value = -1;
};

struct MemberLoop {
    std::vector<NodeId> body;
};

struct Assignment {
    std::string name;
    ExprId value = -1;
};

struct RuleNode {
    NodeId id = 0;
    std::variant<Conditional, Return, MemberLoop, Assignment> body;
    int line = 0;  // 1-based source line, informational only

    NodeKind kind() const { return static_cast<NodeKind>(body.index()); }
};

// A parsed checker. Node ids are dense 0..N-1 in source order; `entry` is the
// first top-level statement and runs on every evaluation.
struct RuleProgram {
    std::string opportunity_id;
    std::vector<RuleNode> nodes;
    std::vector<Expr> exprs;
    std::vector<NodeId> body;
    NodeId entry = 0;
    std::string source_text;

    const RuleNode& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
    const Expr& expr(ExprId id) const { return exprs.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return nodes.size(); }
};

// Same opportunity id, same statement tree, same expressions. Source text
// and line numbers are ignored.
bool structurally_equal(const RuleProgram& a, const RuleProgram& b);

// Schema-level keys read anywhere in the program, plus household.size when
// the program contains a member loop.
std::vector<SlotKey> slots_read(const RuleProgram& program);

// String literals compared (== / !=) directly against a lookup of `slot`.
std::vector<std::string> compared_literals(const RuleProgram& program, const SlotKey& slot);

// Numeric literals compared against a lookup of `slot`, sorted and unique.
std::vector<double> compared_thresholds(const RuleProgram& program, const SlotKey& slot);

}  // namespace screener::rules
