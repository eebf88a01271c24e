#include "screener/rules/evaluator.hpp"

#include "screener/rules/printer.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace screener::rules {

namespace {

using Value = std::variant<bool, double, std::string>;

const char* type_name(const Value& v) {
    switch (v.index()) {
        case 0: return "boolean";
        case 1: return "number";
        default: return "string";
    }
}

class Interpreter {
public:
    Interpreter(const RuleProgram& p, const features::FeatureStore& s) : prog_(p), store_(s) {}

    EvalOutcome run() {
        auto result = run_block(prog_.body);
        if (miss_) return *miss_;
        if (!result) {
            // The parser guarantees a return on every path.
            throw Error("checker " + prog_.opportunity_id + " finished without a value");
        }
        return Decision{*result, std::move(trace_), std::move(reads_)};
    }

private:
    // nullopt: fell through (or stopped on a miss, see miss_).
    std::optional<bool> run_block(const std::vector<NodeId>& block) {
        for (NodeId id : block) {
            auto r = run_node(id);
            if (r || miss_) return r;
        }
        return std::nullopt;
    }

    std::optional<bool> run_node(NodeId id) {
        const RuleNode& n = prog_.node(id);
        trace_.executed.insert(id);
        trace_.visits.insert(Visit{id, iteration_});
        current_ = id;

        if (const auto* c = std::get_if<Conditional>(&n.body)) {
            auto v = eval(c->condition);
            if (!v) return std::nullopt;
            const auto* b = std::get_if<bool>(&*v);
            if (!b) throw TypeFault(std::string("condition is a ") + type_name(*v) + ", not a boolean", id);
            return run_block(*b ? c->then_block : c->else_block);
        }
        if (const auto* r = std::get_if<Return>(&n.body)) {
            auto v = eval(r->value);
            if (!v) return std::nullopt;
            const auto* b = std::get_if<bool>(&*v);
            if (!b) throw TypeFault(std::string("checker returned a ") + type_name(*v), id);
            return *b;
        }
        if (const auto* a = std::get_if<Assignment>(&n.body)) {
            auto v = eval(a->value);
            if (!v) return std::nullopt;
            vars_[a->name] = std::move(*v);
            return std::nullopt;
        }
        const auto& loop = std::get<MemberLoop>(n.body);
        const KeyPath size_key = KeyPath::household(kHouseholdSizeKey);
        auto size = lookup(size_key);
        if (!size) return std::nullopt;
        const auto* count = std::get_if<double>(&*size);
        if (!count || *count < 0) throw TypeFault("household size is not a count", id);
        for (int i = 0; i < static_cast<int>(*count); ++i) {
            iteration_ = i;
            auto r = run_block(loop.body);
            iteration_ = -1;
            if (r || miss_) return r;
        }
        return std::nullopt;
    }

    std::optional<Value> lookup(const KeyPath& key) {
        auto v = store_.get(key);
        if (!v) {
            miss_ = Missing{key, current_};
            return std::nullopt;
        }
        if (std::find(reads_.begin(), reads_.end(), key) == reads_.end()) reads_.push_back(key);
        if (const auto* i = std::get_if<std::int64_t>(&*v)) return Value{static_cast<double>(*i)};
        if (const auto* d = std::get_if<double>(&*v)) return Value{*d};
        return Value{std::get<std::string>(*v)};
    }

    std::optional<Value> eval(ExprId id) {
        const Expr& e = prog_.expr(id);
        if (const auto* lit = std::get_if<Literal>(&e)) {
            return std::visit([](const auto& x) { return Value{x}; }, lit->value);
        }
        if (const auto* var = std::get_if<VariableRef>(&e)) {
            auto it = vars_.find(var->name);
            if (it == vars_.end()) throw TypeFault("variable '" + var->name + "' read before assignment", current_);
            return it->second;
        }
        if (const auto* f = std::get_if<FeatureLookup>(&e)) {
            switch (f->target) {
                case LookupTarget::Household: return lookup(KeyPath::household(f->key));
                case LookupTarget::LoopMember: return lookup(KeyPath::member(iteration_, f->key));
                case LookupTarget::IndexedMember: return lookup(KeyPath::member(f->index, f->key));
            }
        }
        if (const auto* n = std::get_if<Negate>(&e)) {
            auto v = eval(n->operand);
            if (!v) return std::nullopt;
            const auto* d = std::get_if<double>(&*v);
            if (!d) throw TypeFault(std::string("cannot negate a ") + type_name(*v), current_);
            return Value{-*d};
        }
        const auto& b = std::get<Binary>(e);
        auto lhs = eval(b.lhs);
        if (!lhs) return std::nullopt;
        auto rhs = eval(b.rhs);
        if (!rhs) return std::nullopt;
        return apply(b.op, *lhs, *rhs);
    }

    Value apply(BinaryOp op, const Value& l, const Value& r) {
        if (l.index() != r.index()) {
            throw TypeFault(std::string("cannot apply '") + symbol(op) + "' to " + type_name(l) + " and " +
                                type_name(r),
                            current_);
        }
        if (const auto* x = std::get_if<double>(&l)) {
            const double y = std::get<double>(r);
            switch (op) {
                case BinaryOp::Add: return *x + y;
                case BinaryOp::Sub: return *x - y;
                case BinaryOp::Mul: return *x * y;
                case BinaryOp::Div:
                    if (y == 0) throw TypeFault("division by zero", current_);
                    return *x / y;
                case BinaryOp::Lt: return *x < y;
                case BinaryOp::Le: return *x <= y;
                case BinaryOp::Eq: return *x == y;
                case BinaryOp::Ne: return *x != y;
                case BinaryOp::Ge: return *x >= y;
                case BinaryOp::Gt: return *x > y;
            }
        }
        if (op == BinaryOp::Eq) return l == r;
        if (op == BinaryOp::Ne) return l != r;
        throw TypeFault(std::string("cannot apply '") + symbol(op) + "' to " + type_name(l) + " values", current_);
    }

    const RuleProgram& prog_;
    const features::FeatureStore& store_;
    Trace trace_;
    std::vector<KeyPath> reads_;
    std::map<std::string, Value> vars_;
    std::optional<Missing> miss_;
    NodeId current_ = 0;
    int iteration_ = -1;
};

}  // namespace

EvalOutcome evaluate(const RuleProgram& program, const features::FeatureStore& store) {
    return Interpreter(program, store).run();
}

}  // namespace screener::rules
