#include "screener/rules/ast.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace screener::rules {

const char* symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Lt:  return "<";
        case BinaryOp::Le:  return "<=";
        case BinaryOp::Eq:  return "==";
        case BinaryOp::Ne:  return "!=";
        case BinaryOp::Ge:  return ">=";
        case BinaryOp::Gt:  return ">";
    }
    return "?";
}

bool is_comparison(BinaryOp op) {
    return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Eq || op == BinaryOp::Ne ||
           op == BinaryOp::Ge || op == BinaryOp::Gt;
}

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Conditional: return "conditional";
        case NodeKind::Return:      return "return";
        case NodeKind::MemberLoop:  return "member-loop";
        case NodeKind::Assignment:  return "assignment";
    }
    return "unknown";
}

namespace {

bool expr_equal(const RuleProgram& a, ExprId x, const RuleProgram& b, ExprId y) {
    const Expr& ex = a.expr(x);
    const Expr& ey = b.expr(y);
    if (ex.index() != ey.index()) return false;
    if (const auto* n = std::get_if<Negate>(&ex)) {
        return expr_equal(a, n->operand, b, std::get<Negate>(ey).operand);
    }
    if (const auto* bx = std::get_if<Binary>(&ex)) {
        const auto& by = std::get<Binary>(ey);
        return bx->op == by.op && expr_equal(a, bx->lhs, b, by.lhs) && expr_equal(a, bx->rhs, b, by.rhs);
    }
    return ex == ey;
}

bool block_equal(const RuleProgram& a, const std::vector<NodeId>& x, const RuleProgram& b,
                 const std::vector<NodeId>& y);

bool node_equal(const RuleProgram& a, NodeId x, const RuleProgram& b, NodeId y) {
    if (x != y) return false;  // ids are part of the structure
    const RuleNode& nx = a.node(x);
    const RuleNode& ny = b.node(y);
    if (nx.body.index() != ny.body.index()) return false;
    if (const auto* c = std::get_if<Conditional>(&nx.body)) {
        const auto& d = std::get<Conditional>(ny.body);
        return expr_equal(a, c->condition, b, d.condition) && block_equal(a, c->then_block, b, d.then_block) &&
               block_equal(a, c->else_block, b, d.else_block);
    }
    if (const auto* r = std::get_if<Return>(&nx.body)) {
        return expr_equal(a, r->value, b, std::get<Return>(ny.body).value);
    }
    if (const auto* l = std::get_if<MemberLoop>(&nx.body)) {
        return block_equal(a, l->body, b, std::get<MemberLoop>(ny.body).body);
    }
    const auto& s = std::get<Assignment>(nx.body);
    const auto& t = std::get<Assignment>(ny.body);
    return s.name == t.name && expr_equal(a, s.value, b, t.value);
}

bool block_equal(const RuleProgram& a, const std::vector<NodeId>& x, const RuleProgram& b,
                 const std::vector<NodeId>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!node_equal(a, x[i], b, y[i])) return false;
    }
    return true;
}

std::optional<SlotKey> lookup_slot(const Expr& e) {
    const auto* f = std::get_if<FeatureLookup>(&e);
    if (!f) return std::nullopt;
    return SlotKey{f->target == LookupTarget::Household ? Scope::Household : Scope::Member, f->key};
}

// Calls visit(lhs, rhs) for every comparison, in both orders.
template <typename F>
void for_each_comparison(const RuleProgram& p, F&& visit) {
    for (const auto& e : p.exprs) {
        const auto* b = std::get_if<Binary>(&e);
        if (!b || !is_comparison(b->op)) continue;
        visit(*b, p.expr(b->lhs), p.expr(b->rhs));
        visit(*b, p.expr(b->rhs), p.expr(b->lhs));
    }
}

}  // namespace

bool structurally_equal(const RuleProgram& a, const RuleProgram& b) {
    return a.opportunity_id == b.opportunity_id && a.nodes.size() == b.nodes.size() && a.entry == b.entry &&
           block_equal(a, a.body, b, b.body);
}

std::vector<SlotKey> slots_read(const RuleProgram& program) {
    std::set<SlotKey> seen;
    std::vector<SlotKey> out;
    auto note = [&](SlotKey k) {
        if (seen.insert(k).second) out.push_back(std::move(k));
    };
    for (const auto& n : program.nodes) {
        if (std::holds_alternative<MemberLoop>(n.body)) {
            note(SlotKey{Scope::Household, kHouseholdSizeKey});
            break;
        }
    }
    for (const auto& e : program.exprs) {
        if (auto slot = lookup_slot(e)) note(*slot);
    }
    return out;
}

std::vector<std::string> compared_literals(const RuleProgram& program, const SlotKey& slot) {
    std::vector<std::string> out;
    for_each_comparison(program, [&](const Binary& b, const Expr& side, const Expr& other) {
        if (b.op != BinaryOp::Eq && b.op != BinaryOp::Ne) return;
        if (lookup_slot(side) != slot) return;
        const auto* lit = std::get_if<Literal>(&other);
        if (!lit) return;
        if (const auto* s = std::get_if<std::string>(&lit->value)) {
            if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
        }
    });
    return out;
}

std::vector<double> compared_thresholds(const RuleProgram& program, const SlotKey& slot) {
    std::set<double> out;
    for_each_comparison(program, [&](const Binary&, const Expr& side, const Expr& other) {
        if (lookup_slot(side) != slot) return;
        if (const auto* lit = std::get_if<Literal>(&other)) {
            if (const auto* d = std::get_if<double>(&lit->value)) out.insert(*d);
        } else if (const auto* neg = std::get_if<Negate>(&other)) {
            if (const auto* lit2 = std::get_if<Literal>(&program.expr(neg->operand))) {
                if (const auto* d = std::get_if<double>(&lit2->value)) out.insert(-*d);
            }
        }
    });
    return {out.begin(), out.end()};
}

}  // namespace screener::rules
