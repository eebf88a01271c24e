#pragma once

#include "screener/features/schema.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace screener::features {

// A candidate value that does not satisfy its slot. Returned, not thrown:
// this is the signal that starts the clarification loop.
struct ValidationError {
    KeyPath key;
    std::string raw;
    SlotConstraint constraint;
    std::string reason;

    std::string message() const;
};

// Second write to a key already holding a value.
class OverwriteFault : public Error {
public:
    explicit OverwriteFault(const KeyPath& key)
        : Error("feature already set: " + to_string(key)), key(key) {}
    KeyPath key;
};

// Canonical-form parsing of a raw value against a constraint. Integers and
// reals must be plain decimal numerals; choices match after trim + case fold.
std::variant<FeatureValue, ValidationError> parse_raw(const KeyPath& key, const SlotConstraint& constraint,
                                                      std::string_view raw);

using FeatureMap = std::map<std::string, FeatureValue>;

// Known facts about one household. Every stored value satisfies its slot,
// and keys are written at most once.
class FeatureStore {
public:
    FeatureStore();
    explicit FeatureStore(FeatureSchema schema);

    const FeatureSchema& schema() const { return *schema_; }

    // std::nullopt is a miss. Throws UndefinedSlot for keys outside the schema.
    std::optional<FeatureValue> get(const KeyPath& key) const;

    // Parses and stores. Throws UndefinedSlot or OverwriteFault.
    std::optional<ValidationError> put(const KeyPath& key, std::string_view raw);
    // Typed write, same checks as put().
    std::optional<ValidationError> put_value(const KeyPath& key, const FeatureValue& value);

    std::optional<std::int64_t> household_size() const;

    const FeatureMap& household() const { return household_; }
    const std::vector<FeatureMap>& members() const { return members_; }

    // Number of stored values across household and members.
    std::size_t value_count() const;

    bool operator==(const FeatureStore& other) const;

private:
    // Throws OverwriteFault when `key` already holds a value.
    void check_unset(const KeyPath& key) const;
    std::optional<ValidationError> check_member_index(const KeyPath& key, std::string_view raw,
                                                      const SlotConstraint& constraint) const;
    std::optional<ValidationError> store(const KeyPath& key, FeatureValue value, std::string_view raw,
                                         const SlotConstraint& constraint);

    std::shared_ptr<const FeatureSchema> schema_;
    FeatureMap household_;
    std::vector<FeatureMap> members_;
};

// Value-semantics form of FeatureStore::put.
std::variant<FeatureStore, ValidationError> put(const FeatureStore& store, const KeyPath& key, std::string_view raw);

// {"household": {...}, "members": [{...}, ...]}
nlohmann::json to_json(const FeatureStore& store);
// Replays every value through put_value; throws Error on any invalid value.
FeatureStore store_from_json(const nlohmann::json& j, const FeatureSchema& schema);

nlohmann::json value_to_json(const FeatureValue& value);
FeatureValue value_from_json(const nlohmann::json& j);

}  // namespace screener::features
