#include "screener/rules/parser.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace screener::rules {

namespace {

enum class Tok { Ident, Number, String, Punct, Newline, Indent, Dedent, End };

struct Token {
    Tok type = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
    bool first_on_line = false;
    int indent = 0;  // leading whitespace width of the token's line
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    std::size_t line_start = 0;
    int line_indent = 0;
    bool at_line_start = true;
    std::size_t i = 0;

    auto column = [&](std::size_t pos) { return static_cast<int>(pos - line_start) + 1; };
    auto push = [&](Tok type, std::string text, std::size_t pos) {
        Token t{type, std::move(text), line, column(pos), at_line_start, line_indent};
        at_line_start = false;
        out.push_back(std::move(t));
    };

    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            line_start = ++i;
            at_line_start = true;
            line_indent = 0;
            while (i < src.size() && (src[i] == ' ' || src[i] == '\t')) {
                line_indent += src[i] == '\t' ? 4 : 1;
                ++i;
            }
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t start = i;
            while (i < src.size() && is_ident_char(src[i])) ++i;
            push(Tok::Ident, std::string(src.substr(start, i - start)), start);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i + 1 < src.size() && src[i] == '.' && std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
                ++i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            if (i < src.size() && is_ident_char(src[i])) {
                throw SyntaxError("malformed number", line, column(start));
            }
            push(Tok::Number, std::string(src.substr(start, i - start)), start);
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            std::size_t start = i++;
            std::string value;
            while (true) {
                if (i >= src.size() || src[i] == '\n') {
                    throw SyntaxError("unterminated string", line, column(start));
                }
                if (src[i] == quote) {
                    ++i;
                    break;
                }
                if (src[i] == '\\' && i + 1 < src.size()) {
                    const char e = src[i + 1];
                    value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    i += 2;
                    continue;
                }
                value += src[i++];
            }
            push(Tok::String, std::move(value), start);
            continue;
        }
        static const char* const two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
        bool matched = false;
        for (const char* op : two_char) {
            if (src.substr(i, 2) == op) {
                if (op[0] == '&' || op[0] == '|') {
                    throw ForbiddenConstruct(std::string("boolean connective '") + op + "' is not allowed; nest conditionals instead",
                                             line, column(i));
                }
                push(Tok::Punct, op, i);
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("{}[]()=<>+-*/:,.;").find(c) != std::string_view::npos) {
            push(Tok::Punct, std::string(1, c), i);
            ++i;
            continue;
        }
        if (c == '!') {
            throw ForbiddenConstruct("negation operator '!' is not allowed; compare with == false", line, column(i));
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", line, column(i));
    }
    Token end{Tok::End, "", line, column(i), true, 0};
    out.push_back(end);
    return out;
}

// Rewrites an indentation-structured token stream with explicit
// NEWLINE/INDENT/DEDENT tokens. Newlines inside brackets are ignored.
std::vector<Token> layout(const std::vector<Token>& raw) {
    std::vector<Token> out;
    std::vector<int> stack{0};
    int depth = 0;
    bool have_line = false;
    for (const auto& t : raw) {
        if (t.type == Tok::End) {
            if (have_line) out.push_back(Token{Tok::Newline, "", t.line, t.column});
            while (stack.size() > 1) {
                stack.pop_back();
                out.push_back(Token{Tok::Dedent, "", t.line, t.column});
            }
            out.push_back(t);
            break;
        }
        if (t.first_on_line && depth == 0) {
            if (have_line) out.push_back(Token{Tok::Newline, "", t.line, t.column});
            if (t.indent > stack.back()) {
                stack.push_back(t.indent);
                out.push_back(Token{Tok::Indent, "", t.line, t.column});
            } else {
                while (t.indent < stack.back()) {
                    stack.pop_back();
                    out.push_back(Token{Tok::Dedent, "", t.line, t.column});
                }
                if (t.indent != stack.back()) {
                    throw SyntaxError("inconsistent indentation", t.line, t.column);
                }
            }
            have_line = true;
        }
        if (t.type == Tok::Punct) {
            if (t.text == "(" || t.text == "[") ++depth;
            if ((t.text == ")" || t.text == "]") && depth > 0) --depth;
        }
        out.push_back(t);
    }
    return out;
}

bool uses_braces(const std::vector<Token>& raw) {
    for (const auto& t : raw) {
        if (t.type == Tok::Punct && t.text == "{") return true;
    }
    return false;
}

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words{"if", "else", "elif", "return", "let", "for", "in", "household",
                                             "member", "members", "hh", "true", "false", "True", "False",
                                             "def", "pass", "float"};
    return words;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, bool braces, RuleProgram& program)
        : toks_(std::move(tokens)), braces_(braces), prog_(program) {}

    void parse_top() {
        skip_newlines();
        if (!braces_ && at_ident("def")) {
            parse_def_wrapper();
            return;
        }
        scopes_.emplace_back();
        prog_.body = parse_statements_until_end();
        scopes_.pop_back();
        check_returns(prog_.body, true);
    }

private:
    // ── token helpers ──
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at_punct(std::string_view p, std::size_t ahead = 0) const {
        return peek(ahead).type == Tok::Punct && peek(ahead).text == p;
    }
    bool at_ident(std::string_view w, std::size_t ahead = 0) const {
        return peek(ahead).type == Tok::Ident && peek(ahead).text == w;
    }
    [[noreturn]] void fail(const std::string& msg, const Token& at) const {
        throw SyntaxError(msg, at.line, at.column);
    }
    [[noreturn]] void forbid(const std::string& msg, const Token& at) const {
        throw ForbiddenConstruct(msg, at.line, at.column);
    }
    const Token& expect_punct(std::string_view p) {
        if (!at_punct(p)) fail("expected '" + std::string(p) + "' but found " + describe(peek()), peek());
        return next();
    }
    void expect_ident(std::string_view w) {
        if (!at_ident(w)) fail("expected '" + std::string(w) + "' but found " + describe(peek()), peek());
        next();
    }
    static std::string describe(const Token& t) {
        switch (t.type) {
            case Tok::End: return "end of input";
            case Tok::Newline: return "end of line";
            case Tok::Indent: return "indentation";
            case Tok::Dedent: return "dedent";
            case Tok::String: return "string \"" + t.text + "\"";
            default: return "'" + t.text + "'";
        }
    }
    void skip_newlines() {
        while (peek().type == Tok::Newline || at_punct(";")) next();
    }
    void check_forbidden_word(const Token& t) const {
        if (t.type != Tok::Ident) return;
        if (t.text == "and" || t.text == "or") {
            forbid("boolean connective '" + t.text + "' is not allowed; nest conditionals instead", t);
        }
        if (t.text == "not") forbid("'not' is not allowed; compare with == false instead", t);
        if (t.text == "try" || t.text == "except" || t.text == "finally") {
            forbid("'" + t.text + "' blocks are not allowed; missing keys are handled by the engine", t);
        }
        if (t.text == "get") forbid("default-value lookups (.get) are not allowed", t);
    }

    // ── statements ──
    NodeId new_node(int line) {
        const auto id = static_cast<NodeId>(prog_.nodes.size());
        RuleNode node;
        node.id = id;
        node.line = line;
        prog_.nodes.push_back(std::move(node));
        return id;
    }

    std::vector<NodeId> parse_statements_until_end() {
        std::vector<NodeId> out;
        skip_newlines();
        while (peek().type != Tok::End) {
            if (auto id = parse_statement()) out.push_back(*id);
            skip_newlines();
        }
        return out;
    }

    std::vector<NodeId> parse_block() {
        std::vector<NodeId> out;
        scopes_.emplace_back();
        if (braces_) {
            expect_punct("{");
            skip_newlines();
            while (!at_punct("}")) {
                if (peek().type == Tok::End) fail("unterminated block", peek());
                if (auto id = parse_statement()) out.push_back(*id);
                skip_newlines();
            }
            next();
        } else {
            expect_punct(":");
            if (peek().type != Tok::Newline) {
                // single-line suite: `if x: return True`
                if (auto id = parse_statement()) out.push_back(*id);
            } else {
                next();
                if (peek().type != Tok::Indent) fail("expected an indented block", peek());
                next();
                skip_newlines();
                while (peek().type != Tok::Dedent) {
                    if (peek().type == Tok::End) fail("unterminated block", peek());
                    if (auto id = parse_statement()) out.push_back(*id);
                    skip_newlines();
                }
                next();
            }
        }
        scopes_.pop_back();
        return out;
    }

    std::optional<NodeId> parse_statement() {
        const Token& t = peek();
        check_forbidden_word(t);
        if (t.type != Tok::Ident) fail("expected a statement but found " + describe(t), t);
        if (t.text == "if") return parse_if();
        if (t.text == "return") {
            next();
            const NodeId id = new_node(t.line);
            const ExprId value = parse_expr();
            prog_.nodes[static_cast<std::size_t>(id)].body = Return{value};
            return id;
        }
        if (t.text == "let") {
            next();
            return parse_assignment(t.line);
        }
        if (t.text == "for") return parse_for();
        if (t.text == "pass" && !braces_) {
            next();
            return std::nullopt;
        }
        if (t.text == "else" || t.text == "elif") fail("'" + t.text + "' without a matching 'if'", t);
        if (t.text == "def") fail("nested function definitions are not supported", t);
        if (at_punct("=", 1)) return parse_assignment(t.line);
        fail("expected a statement but found " + describe(t), t);
    }

    NodeId parse_assignment(int line) {
        const Token& name = next();
        if (name.type != Tok::Ident || reserved_words().count(name.text)) {
            fail("expected a variable name but found " + describe(name), name);
        }
        check_forbidden_word(name);
        expect_punct("=");
        const NodeId id = new_node(line);
        const ExprId value = parse_expr();
        declare(name.text);
        prog_.nodes[static_cast<std::size_t>(id)].body = Assignment{name.text, value};
        return id;
    }

    NodeId parse_if() {
        const Token& kw = next();
        const NodeId id = new_node(kw.line);
        const ExprId cond = parse_expr();
        Conditional c;
        c.condition = cond;
        c.then_block = parse_block();
        // `else` may sit on the next line in indentation mode.
        std::size_t save = pos_;
        if (!braces_) skip_newlines();
        if (at_ident("else")) {
            next();
            if (at_ident("if")) {
                c.else_block.push_back(parse_if());
            } else {
                c.else_block = parse_block();
            }
        } else if (!braces_ && at_ident("elif")) {
            c.else_block.push_back(parse_if());
        } else {
            pos_ = save;
        }
        if (c.then_block.empty() && c.else_block.empty()) {
            fail("conditional with two empty branches has no effect", kw);
        }
        prog_.nodes[static_cast<std::size_t>(id)].body = std::move(c);
        return id;
    }

    NodeId parse_for() {
        const Token& kw = next();
        if (in_loop_) fail("nested member loops are not supported", kw);
        expect_ident("member");
        expect_ident("in");
        if (!(at_ident("household") || at_ident("hh"))) {
            fail("member loops iterate over 'household' only", peek());
        }
        next();
        const NodeId id = new_node(kw.line);
        in_loop_ = true;
        MemberLoop loop;
        loop.body = parse_block();
        in_loop_ = false;
        if (loop.body.empty()) fail("empty member loop", kw);
        prog_.nodes[static_cast<std::size_t>(id)].body = std::move(loop);
        return id;
    }

    void parse_def_wrapper() {
        next();
        const Token& name = next();
        if (name.type != Tok::Ident) fail("expected a function name", name);
        expect_punct("(");
        const Token& arg = next();
        if (arg.type != Tok::Ident) fail("expected a single parameter", arg);
        expect_punct(")");
        scopes_.emplace_back();
        prog_.body = parse_block();
        scopes_.pop_back();
        skip_newlines();
        if (peek().type != Tok::End) fail("only one function definition is allowed", peek());
        check_returns(prog_.body, true);
    }

    // Every block must end in a return on all paths at top level, and no
    // statement may follow one that always returns.
    bool check_returns(const std::vector<NodeId>& block, bool top) {
        bool returns = false;
        for (std::size_t i = 0; i < block.size(); ++i) {
            const RuleNode& n = prog_.nodes[static_cast<std::size_t>(block[i])];
            if (returns) {
                throw SyntaxError("unreachable statement", n.line, 1);
            }
            if (std::holds_alternative<Return>(n.body)) {
                returns = true;
            } else if (const auto* c = std::get_if<Conditional>(&n.body)) {
                const bool t = check_returns(c->then_block, false);
                const bool e = check_returns(c->else_block, false);
                returns = t && e;
            } else if (const auto* l = std::get_if<MemberLoop>(&n.body)) {
                check_returns(l->body, false);
            }
        }
        if (top && !returns) {
            const int line = block.empty() ? 1 : prog_.nodes[static_cast<std::size_t>(block.back())].line;
            throw MissingReturn("some execution path does not return a value", line, 1);
        }
        return returns;
    }

    // ── variables ──
    void declare(const std::string& name) {
        for (const auto& scope : scopes_) {
            if (scope.count(name)) return;  // assignment to an existing binding
        }
        scopes_.back().insert(name);
    }
    bool declared(const std::string& name) const {
        for (const auto& scope : scopes_) {
            if (scope.count(name)) return true;
        }
        return false;
    }

    // ── expressions ──
    ExprId add(Expr e) {
        prog_.exprs.push_back(std::move(e));
        return static_cast<ExprId>(prog_.exprs.size() - 1);
    }

    static std::optional<BinaryOp> comparison_op(const Token& t) {
        if (t.type != Tok::Punct) return std::nullopt;
        if (t.text == "<") return BinaryOp::Lt;
        if (t.text == "<=") return BinaryOp::Le;
        if (t.text == "==") return BinaryOp::Eq;
        if (t.text == "!=") return BinaryOp::Ne;
        if (t.text == ">=") return BinaryOp::Ge;
        if (t.text == ">") return BinaryOp::Gt;
        return std::nullopt;
    }

    ExprId parse_expr() {
        ExprId lhs = parse_additive();
        if (auto op = comparison_op(peek())) {
            next();
            ExprId rhs = parse_additive();
            lhs = add(Binary{*op, lhs, rhs});
            if (comparison_op(peek())) fail("chained comparisons are not allowed; nest conditionals", peek());
        }
        check_forbidden_word(peek());
        return lhs;
    }

    ExprId parse_additive() {
        ExprId lhs = parse_term();
        while (at_punct("+") || at_punct("-")) {
            const BinaryOp op = next().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            ExprId rhs = parse_term();
            lhs = add(Binary{op, lhs, rhs});
        }
        return lhs;
    }

    ExprId parse_term() {
        ExprId lhs = parse_unary();
        while (at_punct("*") || at_punct("/")) {
            const BinaryOp op = next().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
            ExprId rhs = parse_unary();
            lhs = add(Binary{op, lhs, rhs});
        }
        return lhs;
    }

    ExprId parse_unary() {
        if (at_punct("-")) {
            next();
            ExprId operand = parse_unary();
            return add(Negate{operand});
        }
        return parse_primary();
    }

    std::string parse_key() {
        expect_punct("[");
        const Token& k = next();
        if (k.type != Tok::String) {
            forbid("feature keys must be literal strings", k);
        }
        expect_punct("]");
        return k.text;
    }

    int parse_index() {
        expect_punct("[");
        const Token& t = next();
        int index = -1;
        if (t.type == Tok::Number) {
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), index);
            if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) index = -1;
        }
        if (index < 0) forbid("member indexes must be non-negative integer literals", t);
        expect_punct("]");
        return index;
    }

    ExprId finish_lookup(FeatureLookup lookup) {
        if (at_punct(".")) {
            const Token& dot = next();
            if (at_ident("get")) forbid("default-value lookups (.get) are not allowed", peek());
            fail("attribute access is not supported", dot);
        }
        return add(std::move(lookup));
    }

    ExprId parse_primary() {
        const Token& t = peek();
        check_forbidden_word(t);
        if (t.type == Tok::Number) {
            next();
            double v = 0;
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            return add(Literal{v, t.text.find('.') == std::string::npos});
        }
        if (t.type == Tok::String) {
            next();
            return add(Literal{t.text, false});
        }
        if (at_punct("(")) {
            next();
            ExprId inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        if (t.type != Tok::Ident) fail("expected an expression but found " + describe(t), t);
        next();
        if (t.text == "true" || t.text == "True") return add(Literal{true, false});
        if (t.text == "false" || t.text == "False") return add(Literal{false, false});
        if (t.text == "household") {
            if (at_punct(".")) return finish_lookup({});
            return finish_lookup(FeatureLookup{LookupTarget::Household, -1, parse_key()});
        }
        if (t.text == "hh") {
            if (at_punct(".")) return finish_lookup({});
            if (at_punct("[") && peek(1).type == Tok::Number) {
                const int index = parse_index();
                return finish_lookup(FeatureLookup{LookupTarget::IndexedMember, index, parse_key()});
            }
            return finish_lookup(FeatureLookup{LookupTarget::Household, -1, parse_key()});
        }
        if (t.text == "members") {
            const int index = parse_index();
            return finish_lookup(FeatureLookup{LookupTarget::IndexedMember, index, parse_key()});
        }
        if (t.text == "member") {
            if (!in_loop_) fail("'member' is only defined inside 'for member in household'", t);
            return finish_lookup(FeatureLookup{LookupTarget::LoopMember, -1, parse_key()});
        }
        if (t.text == "float" && at_punct("(")) {
            next();
            ExprId inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        if (at_punct("(")) fail("function calls are not supported", t);
        if (reserved_words().count(t.text)) fail("unexpected keyword '" + t.text + "'", t);
        if (!declared(t.text)) fail("undefined variable '" + t.text + "'", t);
        return add(VariableRef{t.text});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool braces_;
    RuleProgram& prog_;
    std::vector<std::set<std::string>> scopes_;
    bool in_loop_ = false;
};

}  // namespace

RuleProgram parse_program(std::string_view source, const std::string& opportunity_id) {
    RuleProgram program;
    program.opportunity_id = opportunity_id;
    program.source_text = std::string(source);
    std::vector<Token> raw = lex(source);
    const bool braces = uses_braces(raw);
    Parser parser(braces ? std::move(raw) : layout(raw), braces, program);
    parser.parse_top();
    program.entry = 0;
    return program;
}

}  // namespace screener::rules
