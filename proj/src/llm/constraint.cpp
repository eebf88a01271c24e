#include "screener/llm/constraint.hpp"

#include "screener/llm/provider.hpp"
#include "screener/text.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

namespace screener::llm {

OutputConstraint OutputConstraint::choice_set(std::vector<std::string> choices) {
    OutputConstraint c;
    c.kind = ConstraintKind::ChoiceSet;
    c.choices = std::move(choices);
    c.check();
    return c;
}

OutputConstraint OutputConstraint::integer() {
    OutputConstraint c;
    c.kind = ConstraintKind::IntegerPattern;
    return c;
}

OutputConstraint OutputConstraint::real() {
    OutputConstraint c;
    c.kind = ConstraintKind::RealPattern;
    return c;
}

OutputConstraint OutputConstraint::boolean() {
    return OutputConstraint{};
}

OutputConstraint OutputConstraint::boolean_array(int length) {
    OutputConstraint c;
    c.kind = ConstraintKind::BooleanArray;
    c.length = length;
    c.check();
    return c;
}

void OutputConstraint::check() const {
    if (kind == ConstraintKind::ChoiceSet && choices.empty()) throw InvalidRequest("empty choice set");
    if (kind == ConstraintKind::BooleanArray && length < 1) {
        throw InvalidRequest("boolean array length must be at least 1");
    }
}

std::string OutputConstraint::describe() const {
    switch (kind) {
        case ConstraintKind::ChoiceSet: return "exactly one of: " + text::join(choices, ", ");
        case ConstraintKind::IntegerPattern: return "a whole number written with digits only";
        case ConstraintKind::RealPattern: return "a number written with digits, optionally with a decimal point";
        case ConstraintKind::Boolean: return "one word, True or False";
        case ConstraintKind::BooleanArray:
            return "a boolean array of length " + std::to_string(length) + ", e.g. [true, false]";
    }
    return "";
}

std::string strip_code_fence(std::string_view text_in) {
    std::string t = text::trim(text_in);
    if (t.rfind("```", 0) != 0) return t;
    auto first_nl = t.find('\n');
    if (first_nl == std::string::npos) return t;
    auto close = t.rfind("```");
    if (close == std::string::npos || close <= first_nl) return text::trim(t.substr(first_nl + 1));
    return text::trim(t.substr(first_nl + 1, close - first_nl - 1));
}

namespace {

std::string unwrap(std::string_view raw) {
    std::string t = strip_code_fence(raw);
    if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') || (t.front() == '\'' && t.back() == '\'') ||
                          (t.front() == '`' && t.back() == '`'))) {
        t = text::trim(t.substr(1, t.size() - 2));
    }
    if (!t.empty() && t.back() == '.' && t.find_first_of("0123456789") == std::string::npos) t.pop_back();
    return text::trim(t);
}

std::optional<bool> parse_bool_word(std::string_view w) {
    const std::string f = text::fold(w);
    if (f == "true") return true;
    if (f == "false") return false;
    return std::nullopt;
}

std::optional<std::vector<bool>> parse_array(const std::string& t, int length) {
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') return std::nullopt;
    std::vector<bool> out;
    std::string inner = t.substr(1, t.size() - 2);
    if (text::trim(inner).empty()) return std::nullopt;
    std::size_t start = 0;
    while (true) {
        auto comma = inner.find(',', start);
        auto item = parse_bool_word(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item) return std::nullopt;
        out.push_back(*item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (static_cast<int>(out.size()) != length) return std::nullopt;
    return out;
}

}  // namespace

std::optional<ConstrainedValue> parse_constrained(const OutputConstraint& c, std::string_view raw) {
    const std::string t = unwrap(raw);
    switch (c.kind) {
        case ConstraintKind::Boolean:
            if (auto b = parse_bool_word(t)) return ConstrainedValue{*b};
            return std::nullopt;
        case ConstraintKind::ChoiceSet: {
            const std::string f = text::fold(t);
            for (const auto& choice : c.choices) {
                if (text::fold(choice) == f) return ConstrainedValue{choice};
            }
            return std::nullopt;
        }
        case ConstraintKind::IntegerPattern: {
            static const std::regex re(R"([+-]?[0-9]+)");
            if (!std::regex_match(t, re)) return std::nullopt;
            std::int64_t v = 0;
            const char* b = t.data() + (t[0] == '+' ? 1 : 0);
            auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
            return ConstrainedValue{v};
        }
        case ConstraintKind::RealPattern: {
            static const std::regex re(R"([+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?)");
            if (!std::regex_match(t, re)) return std::nullopt;
            double v = 0;
            const char* b = t.data() + (t[0] == '+' ? 1 : 0);
            auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
            return ConstrainedValue{v};
        }
        case ConstraintKind::BooleanArray:
            if (auto a = parse_array(t, c.length)) return ConstrainedValue{*a};
            return std::nullopt;
    }
    return std::nullopt;
}

bool satisfies(const OutputConstraint& c, const ConstrainedValue& v) {
    switch (c.kind) {
        case ConstraintKind::Boolean: return std::holds_alternative<bool>(v);
        case ConstraintKind::IntegerPattern: return std::holds_alternative<std::int64_t>(v);
        case ConstraintKind::RealPattern: return std::holds_alternative<double>(v);
        case ConstraintKind::ChoiceSet: {
            const auto* s = std::get_if<std::string>(&v);
            return s && std::find(c.choices.begin(), c.choices.end(), *s) != c.choices.end();
        }
        case ConstraintKind::BooleanArray: {
            const auto* a = std::get_if<std::vector<bool>>(&v);
            return a && static_cast<int>(a->size()) == c.length;
        }
    }
    return false;
}

}  // namespace screener::llm
