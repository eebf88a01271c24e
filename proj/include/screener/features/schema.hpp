#pragma once

#include "screener/error.hpp"
#include "screener/key_path.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace screener::features {

enum class SlotKind { Integer, Real, Choice };

std::string to_string(SlotKind kind);

// Type constraint attached to every key a checker reads.
struct SlotConstraint {
    SlotKind kind = SlotKind::Integer;
    std::vector<std::string> choices;  // Choice only, canonical spelling
    std::optional<double> low;
    std::optional<double> high;

    static SlotConstraint integer(std::optional<double> low = {}, std::optional<double> high = {});
    static SlotConstraint real(std::optional<double> low = {}, std::optional<double> high = {});
    static SlotConstraint choice(std::vector<std::string> choices);

    // Human-readable form used in clarification prompts and error text,
    // e.g. "integer in [0, 130]" or "one of: yes, no".
    std::string describe() const;

    bool operator==(const SlotConstraint&) const = default;
};

class InvalidConstraint : public Error {
public:
    using Error::Error;
};

class DuplicateSlot : public Error {
public:
    explicit DuplicateSlot(const SlotKey& slot)
        : Error("slot already defined: " + to_string(slot)), slot(slot) {}
    SlotKey slot;
};

class UndefinedSlot : public Error {
public:
    explicit UndefinedSlot(const SlotKey& slot)
        : Error("no slot defined for " + to_string(slot)), slot(slot) {}
    SlotKey slot;
};

class SchemaConflict : public Error {
public:
    explicit SchemaConflict(const SlotKey& slot)
        : Error("conflicting constraints for " + to_string(slot)), slot(slot) {}
    SlotKey slot;
};

// Throws InvalidConstraint unless the constraint is well formed.
void check_constraint(const SlotConstraint& constraint);

// The slot map for one or more checkers. Copying is cheap enough for the
// sizes involved (tens of slots), so the type has plain value semantics.
class FeatureSchema {
public:
    const SlotConstraint* find(const SlotKey& slot) const;
    // Throws UndefinedSlot.
    const SlotConstraint& at(const SlotKey& slot) const;
    bool contains(const SlotKey& slot) const { return find(slot) != nullptr; }

    const std::map<SlotKey, SlotConstraint>& slots() const { return slots_; }
    std::size_t size() const { return slots_.size(); }
    bool empty() const { return slots_.empty(); }

    bool operator==(const FeatureSchema&) const = default;

private:
    friend FeatureSchema define_slot(const FeatureSchema&, const SlotKey&, const SlotConstraint&);
    std::map<SlotKey, SlotConstraint> slots_;
};

// Returns a copy of `schema` with the slot added. A key may live in only one
// scope, so defining member.age after household.age is also a duplicate.
FeatureSchema define_slot(const FeatureSchema& schema, const SlotKey& slot, const SlotConstraint& constraint);

// Union of two schemas; shared keys must carry identical constraints.
FeatureSchema merge(const FeatureSchema& a, const FeatureSchema& b);

// Constraint every checker shares for the household size key.
SlotConstraint household_size_constraint();

nlohmann::json to_json(const SlotConstraint& constraint);
SlotConstraint constraint_from_json(const nlohmann::json& j);

// {"slots": [{"scope": "member", "key": "age", "kind": "integer", "low": 0, "high": 130}, ...]}
nlohmann::json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

}  // namespace screener::features
