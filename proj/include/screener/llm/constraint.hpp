#pragma once

#include "screener/error.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace screener::llm {

enum class ConstraintKind { ChoiceSet, IntegerPattern, RealPattern, Boolean, BooleanArray };

// Machine-checkable shape of a model emission.
struct OutputConstraint {
    ConstraintKind kind = ConstraintKind::Boolean;
    std::vector<std::string> choices;  // ChoiceSet
    int length = 0;                    // BooleanArray

    static OutputConstraint choice_set(std::vector<std::string> choices);
    static OutputConstraint integer();
    static OutputConstraint real();
    static OutputConstraint boolean();
    static OutputConstraint boolean_array(int length);

    // Throws InvalidRequest for an empty choice set or a non-positive length.
    void check() const;
    std::string describe() const;
};

using ConstrainedValue = std::variant<bool, std::int64_t, double, std::string, std::vector<bool>>;

// Parses an emission; nullopt when it does not conform. Leading/trailing
// whitespace, a wrapping code fence, surrounding quotes and a trailing period
// are tolerated. Choices come back in their canonical spelling.
std::optional<ConstrainedValue> parse_constrained(const OutputConstraint& c, std::string_view raw);

// True when `v` satisfies `c` (the type check the fuzz tests lean on).
bool satisfies(const OutputConstraint& c, const ConstrainedValue& v);

// Removes a ```lang ... ``` fence if the text is wrapped in one.
std::string strip_code_fence(std::string_view text);

class ConstraintExhausted : public Error {
public:
    ConstraintExhausted(const std::string& what, std::string last_raw, int attempts)
        : Error(what), last_raw(std::move(last_raw)), attempts(attempts) {}
    std::string last_raw;
    int attempts;
};

}  // namespace screener::llm
