#include "screener/rules/printer.hpp"

#include <charconv>
#include <cmath>

namespace screener::rules {

namespace {

// Binding strength; higher binds tighter.
int precedence(const RuleProgram& p, ExprId id) {
    const Expr& e = p.expr(id);
    if (const auto* b = std::get_if<Binary>(&e)) {
        if (is_comparison(b->op)) return 1;
        if (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) return 2;
        return 3;
    }
    if (std::holds_alternative<Negate>(e)) return 4;
    return 5;
}

std::string number_text(double v, bool integral) {
    char buf[128];
    if (integral && v == std::floor(v)) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 0);
        return std::string(buf, ptr);
    }
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    std::string s(buf, ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"':  out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:   out += c;
        }
    }
    return out + "\"";
}

std::string wrap(const RuleProgram& p, ExprId id, bool parens) {
    std::string s = expr_to_string(p, id);
    return parens ? "(" + s + ")" : s;
}

void print_block(const RuleProgram& p, const std::vector<NodeId>& block, int depth, std::string& out);

void print_node(const RuleProgram& p, NodeId id, int depth, std::string& out) {
    const std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
    const RuleNode& n = p.node(id);
    if (const auto* c = std::get_if<Conditional>(&n.body)) {
        out += indent + node_line(p, id) + " {\n";
        print_block(p, c->then_block, depth + 1, out);
        // Chain `else if` when the else branch is exactly one conditional.
        const Conditional* cur = c;
        while (cur->else_block.size() == 1 &&
               std::holds_alternative<Conditional>(p.node(cur->else_block[0]).body)) {
            const NodeId next_id = cur->else_block[0];
            out += indent + "} else " + node_line(p, next_id) + " {\n";
            cur = &std::get<Conditional>(p.node(next_id).body);
            print_block(p, cur->then_block, depth + 1, out);
        }
        if (!cur->else_block.empty()) {
            out += indent + "} else {\n";
            print_block(p, cur->else_block, depth + 1, out);
        }
        out += indent + "}\n";
        return;
    }
    if (const auto* l = std::get_if<MemberLoop>(&n.body)) {
        out += indent + node_line(p, id) + " {\n";
        print_block(p, l->body, depth + 1, out);
        out += indent + "}\n";
        return;
    }
    out += indent + node_line(p, id) + "\n";
}

void print_block(const RuleProgram& p, const std::vector<NodeId>& block, int depth, std::string& out) {
    for (NodeId id : block) print_node(p, id, depth, out);
}

}  // namespace

std::string expr_to_string(const RuleProgram& p, ExprId id) {
    const Expr& e = p.expr(id);
    if (const auto* lit = std::get_if<Literal>(&e)) {
        if (const auto* b = std::get_if<bool>(&lit->value)) return *b ? "true" : "false";
        if (const auto* d = std::get_if<double>(&lit->value)) return number_text(*d, lit->integral);
        return quote(std::get<std::string>(lit->value));
    }
    if (const auto* v = std::get_if<VariableRef>(&e)) return v->name;
    if (const auto* f = std::get_if<FeatureLookup>(&e)) {
        switch (f->target) {
            case LookupTarget::Household: return "household[" + quote(f->key) + "]";
            case LookupTarget::LoopMember: return "member[" + quote(f->key) + "]";
            case LookupTarget::IndexedMember:
                return "members[" + std::to_string(f->index) + "][" + quote(f->key) + "]";
        }
    }
    if (const auto* n = std::get_if<Negate>(&e)) {
        return "-" + wrap(p, n->operand, precedence(p, n->operand) < 4);
    }
    const auto& b = std::get<Binary>(e);
    const int mine = precedence(p, id);
    const int lp = precedence(p, b.lhs);
    const int rp = precedence(p, b.rhs);
    const bool lparen = is_comparison(b.op) ? lp <= 1 : lp < mine;
    const bool rparen = rp <= mine;
    return wrap(p, b.lhs, lparen) + " " + symbol(b.op) + " " + wrap(p, b.rhs, rparen);
}

std::string node_line(const RuleProgram& p, NodeId id) {
    const RuleNode& n = p.node(id);
    if (const auto* c = std::get_if<Conditional>(&n.body)) return "if " + expr_to_string(p, c->condition);
    if (const auto* r = std::get_if<Return>(&n.body)) return "return " + expr_to_string(p, r->value);
    if (const auto* a = std::get_if<Assignment>(&n.body)) return "let " + a->name + " = " + expr_to_string(p, a->value);
    return "for member in household";
}

std::string pretty_print(const RuleProgram& program) {
    std::string out;
    print_block(program, program.body, 0, out);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

}  // namespace screener::rules
