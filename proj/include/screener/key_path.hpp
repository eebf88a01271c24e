#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

namespace screener {

enum class Scope { Household, Member };

// Address of one user fact: either a household-level feature or a feature of
// the member at `member_index` (0 is the head of household).
struct KeyPath {
    Scope scope = Scope::Household;
    int member_index = -1;  // -1 for household scope
    std::string key;

    static KeyPath household(std::string key) { return {Scope::Household, -1, std::move(key)}; }
    static KeyPath member(int index, std::string key) { return {Scope::Member, index, std::move(key)}; }

    bool is_member() const { return scope == Scope::Member; }

    auto operator<=>(const KeyPath&) const = default;
    bool operator==(const KeyPath&) const = default;
};

// Schema-level address: the scope pattern without a concrete member index.
struct SlotKey {
    Scope scope = Scope::Household;
    std::string key;

    static SlotKey of(const KeyPath& path) { return {path.scope, path.key}; }

    auto operator<=>(const SlotKey&) const = default;
    bool operator==(const SlotKey&) const = default;
};

// "household.size", "member(1).age"
std::string to_string(const KeyPath& path);
// "household.size", "member.age"
std::string to_string(const SlotKey& slot);
// Python-dictionary rendering used inside prompts: hh["size"], hh[1]["age"].
std::string to_prompt_key(const KeyPath& path);

// Parses the to_string() forms back; also accepts "member.age" as member(0).
// Throws screener::Error on malformed input.
KeyPath parse_key_path(const std::string& text);
SlotKey parse_slot_key(const std::string& text);

// A validated feature value. Integers and reals stay distinct so that
// re-serialisation is exact; choices are stored in canonical spelling.
using FeatureValue = std::variant<std::int64_t, double, std::string>;

std::string format_value(const FeatureValue& value);

// Shortest decimal text that round-trips the double.
std::string format_real(double value);

// The household-level feature that fixes the member count.
inline constexpr const char* kHouseholdSizeKey = "size";

}  // namespace screener
